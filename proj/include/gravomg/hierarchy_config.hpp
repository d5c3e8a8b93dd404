#pragma once

#include <cstdint>
#include <string_view>

#include "gravomg/sparse.hpp"

namespace gravomg {

enum class SamplingVariant { Gravo, Random, FarthestPoint, MaximalIndependentSet };

/// How the coarse points feeding a prolongation row are chosen.
enum class SelectionVariant {
  VoronoiTriangle,  // closest triangle of the Voronoi-dual candidates around the seed
  Closest2,         // closest k points of the seed and its coarse neighbours
  Closest3,
  Closest4,
  Random3,          // three random points of the seed and its coarse neighbours
  ClosestVertex,    // injection into the single closest coarse point
  AllTriangles,     // closest of all triangles {seed, a, b} with a, b coarse neighbours
};

enum class WeightingVariant { Barycentric, Uniform, InverseDistance };

struct HierarchyConfig {
  double phi = 1.0 / 8.0;       // target fraction of points kept per level
  Index coarsest_size = 1000;   // stop once a level has at most this many points
  int ring_limit = 2;           // hop limit of the sampling exclusion search
  bool shift_seeds = true;      // move coarse points to the mean of their Voronoi cell
  /// A projection that lands exactly on a triangle corner (away from that
  /// corner) is retried along the local normal; if p still lies outside the
  /// triangles it gets inverse-distance weights over three points.
  bool spread_vertex_projections = true;
  SamplingVariant sampling = SamplingVariant::Gravo;
  SelectionVariant selection = SelectionVariant::VoronoiTriangle;
  WeightingVariant weighting = WeightingVariant::Barycentric;
  std::uint64_t rng_seed = 0;   // random sampling and random selection only

  /// Throws std::invalid_argument unless 0 < phi < 1, coarsest_size >= 4 and ring_limit >= 1.
  void validate() const;
};

std::string_view to_string(SamplingVariant v);
std::string_view to_string(SelectionVariant v);
std::string_view to_string(WeightingVariant v);
SamplingVariant parse_sampling_variant(std::string_view name);
SelectionVariant parse_selection_variant(std::string_view name);
WeightingVariant parse_weighting_variant(std::string_view name);

}  // namespace gravomg
