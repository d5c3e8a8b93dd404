#include "gravomg/hierarchy.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <string>

#include "gravomg/sampling.hpp"

namespace gravomg {

void HierarchyConfig::validate() const {
  if (!(phi > 0.0 && phi < 1.0)) throw std::invalid_argument("phi must lie in (0, 1)");
  if (coarsest_size < 4) throw std::invalid_argument("coarsest size must be at least 4");
  if (ring_limit < 1) throw std::invalid_argument("ring limit must be at least 1");
}

std::string_view to_string(SamplingVariant v) {
  switch (v) {
    case SamplingVariant::Gravo: return "gravo";
    case SamplingVariant::Random: return "random";
    case SamplingVariant::FarthestPoint: return "fps";
    case SamplingVariant::MaximalIndependentSet: return "mis";
  }
  return "unknown";
}

std::string_view to_string(SelectionVariant v) {
  switch (v) {
    case SelectionVariant::VoronoiTriangle: return "voronoi_triangle";
    case SelectionVariant::Closest2: return "closest2";
    case SelectionVariant::Closest3: return "closest3";
    case SelectionVariant::Closest4: return "closest4";
    case SelectionVariant::Random3: return "random3";
    case SelectionVariant::ClosestVertex: return "closest_vertex";
    case SelectionVariant::AllTriangles: return "all_triangles";
  }
  return "unknown";
}

std::string_view to_string(WeightingVariant v) {
  switch (v) {
    case WeightingVariant::Barycentric: return "barycentric";
    case WeightingVariant::Uniform: return "uniform";
    case WeightingVariant::InverseDistance: return "inverse_distance";
  }
  return "unknown";
}

SamplingVariant parse_sampling_variant(std::string_view name) {
  for (auto v : {SamplingVariant::Gravo, SamplingVariant::Random, SamplingVariant::FarthestPoint,
                 SamplingVariant::MaximalIndependentSet})
    if (to_string(v) == name) return v;
  throw std::invalid_argument("unknown sampling variant '" + std::string(name) + "'");
}

SelectionVariant parse_selection_variant(std::string_view name) {
  for (auto v : {SelectionVariant::VoronoiTriangle, SelectionVariant::Closest2, SelectionVariant::Closest3,
                 SelectionVariant::Closest4, SelectionVariant::Random3, SelectionVariant::ClosestVertex,
                 SelectionVariant::AllTriangles})
    if (to_string(v) == name) return v;
  throw std::invalid_argument("unknown selection variant '" + std::string(name) + "'");
}

WeightingVariant parse_weighting_variant(std::string_view name) {
  for (auto v : {WeightingVariant::Barycentric, WeightingVariant::Uniform, WeightingVariant::InverseDistance})
    if (to_string(v) == name) return v;
  throw std::invalid_argument("unknown weighting variant '" + std::string(name) + "'");
}

std::vector<Index> select_seeds(const SurfaceGraph& graph, const HierarchyConfig& config, std::size_t level) {
  switch (config.sampling) {
    case SamplingVariant::Gravo: return sample_points(graph, config.phi, config.ring_limit);
    case SamplingVariant::Random:
      return sample_random(graph, config.phi, config.rng_seed + 0x9e3779b97f4a7c15ULL * (level + 1));
    case SamplingVariant::FarthestPoint: return sample_fps(graph, config.phi);
    case SamplingVariant::MaximalIndependentSet: return sample_mis(graph, config.phi);
  }
  throw std::invalid_argument("unknown sampling variant");
}

Hierarchy build_hierarchy(SurfaceGraph graph, const HierarchyConfig& config) {
  config.validate();
  using Clock = std::chrono::steady_clock;

  Hierarchy h;
  h.stats.push_back({graph.num_vertices(), graph.num_edges(), 0, 0.0, 0.0, 0});
  h.triangles.emplace_back();
  h.levels.push_back(std::move(graph));

  while (h.levels.back().num_vertices() > config.coarsest_size) {
    const auto start = Clock::now();
    const SurfaceGraph& fine = h.levels.back();
    const std::size_t level = h.levels.size();

    std::vector<Index> seeds = select_seeds(fine, config, level);
    if (seeds.empty() || static_cast<Index>(seeds.size()) >= fine.num_vertices()) break;

    VoronoiPartition partition = graph_voronoi(fine, seeds);
    std::vector<Edge> coarse_edges = voronoi_adjacency(fine, partition);
    std::vector<Vec3> coarse_positions;
    if (config.shift_seeds) {
      coarse_positions = shift_seeds(partition, fine.positions());
    } else {
      coarse_positions.reserve(seeds.size());
      for (Index s : seeds) coarse_positions.push_back(fine.position(s));
    }

    HierarchyConfig level_config = config;
    level_config.rng_seed = config.rng_seed ^ (0xbf58476d1ce4e5b9ULL * (level + 1));
    Prolongation prolongation = build_prolongation(fine, partition, coarse_positions, coarse_edges, level_config);

    SurfaceGraph coarse(std::move(coarse_positions), std::move(coarse_edges));
    const double seconds = std::chrono::duration<double>(Clock::now() - start).count();

    h.stats.push_back({coarse.num_vertices(), coarse.num_edges(),
                       static_cast<Index>(prolongation.triangles.size()), prolongation.fallback_fraction, seconds,
                       partition.unreachable});
    h.fallback_fraction.push_back(prolongation.fallback_fraction);
    h.prolongations.push_back(std::move(prolongation.matrix));
    h.triangles.push_back(std::move(prolongation.triangles));
    h.levels.push_back(std::move(coarse));
  }
  return h;
}

void write_levels_csv(const Hierarchy& hierarchy, std::ostream& out, bool timings) {
  out << "level,n,edges,triangles,fallback_fraction,seconds\n";
  char buffer[160];
  for (std::size_t l = 0; l < hierarchy.stats.size(); ++l) {
    const LevelStats& s = hierarchy.stats[l];
    const double seconds = timings ? std::round(s.seconds * 1000.0) / 1000.0 : 0.0;
    std::snprintf(buffer, sizeof buffer, "%zu,%td,%td,%td,%.9g,%.9g\n", l + 1, s.vertices, s.edges, s.triangles,
                  s.fallback_fraction, seconds);
    out << buffer;
  }
}

}  // namespace gravomg
