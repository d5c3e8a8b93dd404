#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "gravomg/mesh_io.hpp"

namespace gravomg {

/// Graph Voronoi diagram of a fine level. Cell c belongs to fine vertex
/// seeds[c]; coarse indices are positions in `seeds`.
struct VoronoiPartition {
  std::vector<Index> seeds;
  std::vector<Index> seed_of;   // per fine vertex: coarse index of its cell
  std::vector<double> dist_of;  // per fine vertex: distance to its seed
  /// Vertices with no graph path to any seed. They are assigned to the
  /// Euclidean-nearest seed with the straight-line distance.
  std::size_t unreachable = 0;

  Index num_cells() const { return static_cast<Index>(seeds.size()); }
};

/// Multi-source Dijkstra with Euclidean edge lengths. Equal distances go to
/// the lower coarse index. Throws DimensionError for an empty, duplicated
/// or out-of-range seed list.
VoronoiPartition graph_voronoi(const SurfaceGraph& graph, std::span<const Index> seeds);

/// Coarse edges {a, b} (coarse indices, a < b, sorted) for every pair of
/// cells joined by at least one fine edge.
std::vector<Edge> voronoi_adjacency(const SurfaceGraph& graph, const VoronoiPartition& partition);

using Triangle = std::array<Index, 3>;

/// Every 3-clique of the edge set, each sorted ascending, list sorted.
std::vector<Triangle> candidate_triangles(std::span<const Edge> edges);

/// Mean position of the fine vertices in each cell.
std::vector<Vec3> shift_seeds(const VoronoiPartition& partition, const std::vector<Vec3>& fine_positions);

}  // namespace gravomg
