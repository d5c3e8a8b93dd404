#pragma once

#include <cstdint>

#include "gravomg/mesh_io.hpp"

// Procedural surfaces with known structure for tests and benchmarks.
namespace gravomg::shapes {

/// Unit icosphere. Subdivision s has 10 * 4^s + 2 vertices.
TriangleMesh icosphere(int subdivisions);

/// Torus with `major_segments * minor_segments` vertices.
TriangleMesh torus(double major_radius, double minor_radius, int major_segments, int minor_segments);

/// Copy of `mesh` with every vertex displaced by N(0, (amplitude * mean edge length)^2)
/// noise per coordinate. Connectivity is unchanged.
TriangleMesh perturbed(const TriangleMesh& mesh, double amplitude, std::uint64_t seed);

/// Near-uniform points on the unit sphere (Fibonacci lattice).
PointCloud fibonacci_sphere(int count);

/// Uniformly random points on a torus surface (rejection sampled by area).
PointCloud random_torus_points(double major_radius, double minor_radius, int count, std::uint64_t seed);

/// Regular grid on [0, 1]^2 in the z = 0 plane, two triangles per cell.
/// Has a boundary, unlike the other shapes.
TriangleMesh grid(int cells_x, int cells_y);

}  // namespace gravomg::shapes
