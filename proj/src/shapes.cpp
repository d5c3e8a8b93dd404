#include "gravomg/shapes.hpp"

#include <cmath>
#include <map>
#include <numbers>

#include "gravomg/errors.hpp"
#include "gravomg/rng.hpp"

namespace gravomg::shapes {

TriangleMesh icosphere(int subdivisions) {
  if (subdivisions < 0) throw DimensionError("icosphere subdivisions must be >= 0");
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  TriangleMesh mesh;
  mesh.positions = {{-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0}, {0, -1, t}, {0, 1, t},
                    {0, -1, -t}, {0, 1, -t}, {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
  for (Vec3& p : mesh.positions) p.normalize();
  mesh.faces = {{0, 11, 5}, {0, 5, 1}, {0, 1, 7}, {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
                {11, 10, 2}, {10, 7, 6}, {7, 1, 8}, {3, 9, 4}, {3, 4, 2}, {3, 2, 6}, {3, 6, 8},
                {3, 8, 9}, {4, 9, 5}, {2, 4, 11}, {6, 2, 10}, {8, 6, 7}, {9, 8, 1}};

  for (int s = 0; s < subdivisions; ++s) {
    std::map<Edge, Index> midpoint;
    auto split = [&](Index a, Index b) {
      Edge key{std::min(a, b), std::max(a, b)};
      auto it = midpoint.find(key);
      if (it != midpoint.end()) return it->second;
      Index id = mesh.num_vertices();
      mesh.positions.push_back((mesh.positions[a] + mesh.positions[b]).normalized());
      midpoint.emplace(key, id);
      return id;
    };
    std::vector<Face> faces;
    faces.reserve(mesh.faces.size() * 4);
    for (const Face& f : mesh.faces) {
      Index ab = split(f[0], f[1]);
      Index bc = split(f[1], f[2]);
      Index ca = split(f[2], f[0]);
      faces.push_back({f[0], ab, ca});
      faces.push_back({f[1], bc, ab});
      faces.push_back({f[2], ca, bc});
      faces.push_back({ab, bc, ca});
    }
    mesh.faces = std::move(faces);
  }
  return mesh;
}

TriangleMesh torus(double major_radius, double minor_radius, int major_segments, int minor_segments) {
  if (major_segments < 3 || minor_segments < 3) throw DimensionError("torus needs at least 3x3 segments");
  TriangleMesh mesh;
  const double two_pi = 2.0 * std::numbers::pi;
  for (int i = 0; i < major_segments; ++i) {
    const double u = two_pi * i / major_segments;
    for (int j = 0; j < minor_segments; ++j) {
      const double v = two_pi * j / minor_segments;
      const double ring = major_radius + minor_radius * std::cos(v);
      mesh.positions.emplace_back(ring * std::cos(u), ring * std::sin(u), minor_radius * std::sin(v));
    }
  }
  auto id = [&](int i, int j) {
    return static_cast<Index>((i % major_segments) * minor_segments + (j % minor_segments));
  };
  for (int i = 0; i < major_segments; ++i) {
    for (int j = 0; j < minor_segments; ++j) {
      mesh.faces.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      mesh.faces.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  }
  return mesh;
}

TriangleMesh perturbed(const TriangleMesh& mesh, double amplitude, std::uint64_t seed) {
  double total = 0.0;
  for (const Face& f : mesh.faces)
    for (int k = 0; k < 3; ++k) total += (mesh.positions[f[k]] - mesh.positions[f[(k + 1) % 3]]).norm();
  const double mean_edge = mesh.faces.empty() ? 1.0 : total / (3.0 * mesh.faces.size());
  const double sigma = amplitude * mean_edge;
  Rng rng(seed);
  TriangleMesh out = mesh;
  for (Vec3& p : out.positions) {
    const double dx = rng.normal();
    const double dy = rng.normal();
    const double dz = rng.normal();
    p += sigma * Vec3(dx, dy, dz);
  }
  return out;
}

PointCloud fibonacci_sphere(int count) {
  if (count < 1) throw DimensionError("point count must be positive");
  PointCloud cloud;
  const double golden_angle = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < count; ++i) {
    const double z = 1.0 - 2.0 * (i + 0.5) / count;
    const double radius = std::sqrt(1.0 - z * z);
    const double theta = golden_angle * i;
    cloud.positions.emplace_back(radius * std::cos(theta), radius * std::sin(theta), z);
  }
  return cloud;
}

PointCloud random_torus_points(double major_radius, double minor_radius, int count, std::uint64_t seed) {
  if (count < 1) throw DimensionError("point count must be positive");
  Rng rng(seed);
  PointCloud cloud;
  const double two_pi = 2.0 * std::numbers::pi;
  while (static_cast<int>(cloud.positions.size()) < count) {
    const double u = two_pi * rng.uniform();
    const double v = two_pi * rng.uniform();
    // Area element is proportional to (R + r cos v).
    const double accept = (major_radius + minor_radius * std::cos(v)) / (major_radius + minor_radius);
    if (rng.uniform() >= accept) continue;
    const double ring = major_radius + minor_radius * std::cos(v);
    cloud.positions.emplace_back(ring * std::cos(u), ring * std::sin(u), minor_radius * std::sin(v));
  }
  return cloud;
}

TriangleMesh grid(int cells_x, int cells_y) {
  if (cells_x < 1 || cells_y < 1) throw DimensionError("grid needs at least one cell per axis");
  TriangleMesh mesh;
  for (int j = 0; j <= cells_y; ++j)
    for (int i = 0; i <= cells_x; ++i)
      mesh.positions.emplace_back(static_cast<double>(i) / cells_x, static_cast<double>(j) / cells_y, 0.0);
  auto id = [&](int i, int j) { return static_cast<Index>(j * (cells_x + 1) + i); };
  for (int j = 0; j < cells_y; ++j) {
    for (int i = 0; i < cells_x; ++i) {
      mesh.faces.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      mesh.faces.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  }
  return mesh;
}

}  // namespace gravomg::shapes
