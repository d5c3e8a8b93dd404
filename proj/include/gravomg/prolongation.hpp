#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "gravomg/hierarchy_config.hpp"
#include "gravomg/mesh_io.hpp"
#include "gravomg/voronoi.hpp"

namespace gravomg {

struct TriangleProjection {
  std::array<double, 3> weights;  // barycentric, in [0, 1], summing to 1
  double squared_distance;
  bool degenerate;  // area below 1e-12 * (mean edge)^2; projected onto the longest edge
};

/// Closest point of the closed triangle (a, b, c) to p, by Voronoi-region
/// classification (vertex, edge or face region).
TriangleProjection project_to_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c);

struct Prolongation {
  SparseMatrix matrix;  // fine x coarse, rows are convex weights
  std::size_t fallback_rows = 0;
  double fallback_fraction = 0.0;
  std::vector<Triangle> triangles;  // candidate triangles on the coarse points
};

/// Interpolation weights for every fine vertex from the coarse points at
/// `coarse_positions` (seed positions, shifted or not).
///
/// With the default configuration a fine vertex p in the cell of seed s is
/// projected onto every candidate triangle containing s and takes the
/// barycentric weights of the closest one. It falls back to inverse-distance
/// weights over the (up to) three points of s and its coarse neighbours
/// closest to p when s has no usable triangle, or when the best projection
/// collapses onto a corner that p does not coincide with and p, projected
/// along the mean normal of the triangles around s, lies outside all of them.
Prolongation build_prolongation(const SurfaceGraph& fine, const VoronoiPartition& partition,
                                const std::vector<Vec3>& coarse_positions, std::span<const Edge> coarse_edges,
                                const HierarchyConfig& config);

}  // namespace gravomg
