#include "gravomg/prolongation.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "gravomg/errors.hpp"
#include "gravomg/rng.hpp"

namespace gravomg {

namespace {

using Row = std::vector<std::pair<Index, double>>;

TriangleProjection on_segment(const Vec3& p, const Vec3& x, const Vec3& y, int ix, int iy) {
  const Vec3 d = y - x;
  const double len2 = d.squaredNorm();
  const double t = len2 > 0.0 ? std::clamp((p - x).dot(d) / len2, 0.0, 1.0) : 0.0;
  TriangleProjection out{{0.0, 0.0, 0.0}, (p - (x + t * d)).squaredNorm(), true};
  out.weights[ix] = 1.0 - t;
  out.weights[iy] += t;
  return out;
}

// Inverse-distance weights (d + delta)^-1, normalized.
Row inverse_distance(const Vec3& p, std::span<const Index> points, const std::vector<Vec3>& positions,
                     double delta) {
  Row row;
  double total = 0.0;
  for (Index c : points) {
    const double w = 1.0 / ((p - positions[c]).norm() + delta);
    row.emplace_back(c, w);
    total += w;
  }
  for (auto& [c, w] : row) w /= total;
  return row;
}

Row uniform(std::span<const Index> points) {
  Row row;
  for (Index c : points) row.emplace_back(c, 1.0 / static_cast<double>(points.size()));
  return row;
}

// The `count` points closest to p; equal distances keep the lower index.
std::vector<Index> closest(const Vec3& p, std::vector<Index> points, const std::vector<Vec3>& positions,
                           std::size_t count) {
  std::vector<std::pair<double, Index>> keyed;
  keyed.reserve(points.size());
  for (Index c : points) keyed.emplace_back((p - positions[c]).squaredNorm(), c);
  count = std::min(count, keyed.size());
  std::partial_sort(keyed.begin(), keyed.begin() + static_cast<std::ptrdiff_t>(count), keyed.end());
  std::vector<Index> out;
  for (std::size_t k = 0; k < count; ++k) out.push_back(keyed[k].second);
  return out;
}

// Retry for a projection that collapsed onto a corner: project p along the
// mean normal of the fan around the seed and keep the closest fan triangle
// whose planar barycentric coordinates are all non-negative. A point above a
// convex apex lands inside; a point beside the fan does not.
std::optional<std::pair<Triangle, std::array<double, 3>>> project_along_normal(
    const Vec3& p, const Vec3& seed, const std::vector<Triangle>& fan, const std::vector<Vec3>& positions) {
  Vec3 normal = Vec3::Zero();
  for (const Triangle& t : fan) {
    Vec3 n = (positions[t[1]] - positions[t[0]]).cross(positions[t[2]] - positions[t[0]]);
    const double len = n.norm();
    if (len == 0.0) continue;
    n /= len;
    normal += n.dot(p - seed) < 0.0 ? -n : n;
  }
  if (normal.norm() < 1e-12) return std::nullopt;
  normal.normalize();
  const Vec3 u = normal.unitOrthogonal();
  const Vec3 w = normal.cross(u);
  auto flat = [&](const Vec3& x) { return Eigen::Vector2d((x - seed).dot(u), (x - seed).dot(w)); };

  std::optional<std::pair<Triangle, std::array<double, 3>>> best;
  double best_dist = 0.0;
  const Eigen::Vector2d q = flat(p);
  for (const Triangle& t : fan) {
    const Eigen::Vector2d a = flat(positions[t[0]]), b = flat(positions[t[1]]), c = flat(positions[t[2]]);
    const double area = (b - a).x() * (c - a).y() - (b - a).y() * (c - a).x();
    const double scale = (b - a).squaredNorm() + (c - a).squaredNorm();
    if (std::abs(area) <= 1e-9 * scale) continue;
    const double wb = ((q - a).x() * (c - a).y() - (q - a).y() * (c - a).x()) / area;
    const double wc = ((b - a).x() * (q - a).y() - (b - a).y() * (q - a).x()) / area;
    const double wa = 1.0 - wb - wc;
    constexpr double slack = -1e-12;
    if (wa < slack || wb < slack || wc < slack) continue;
    std::array<double, 3> weights{std::max(wa, 0.0), std::max(wb, 0.0), std::max(wc, 0.0)};
    const double total = weights[0] + weights[1] + weights[2];
    for (double& x : weights) x /= total;
    const Vec3 hit = weights[0] * positions[t[0]] + weights[1] * positions[t[1]] + weights[2] * positions[t[2]];
    const double dist = (p - hit).squaredNorm();
    if (!best || dist < best_dist) {
      best = {{t, weights}};
      best_dist = dist;
    }
  }
  return best;
}

}  // namespace

TriangleProjection project_to_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
  const Vec3 ab = b - a;
  const Vec3 ac = c - a;
  const double mean_edge = (ab.norm() + ac.norm() + (c - b).norm()) / 3.0;
  const double area = 0.5 * ab.cross(ac).norm();
  if (area < 1e-12 * mean_edge * mean_edge || mean_edge == 0.0) {
    const double lab = ab.squaredNorm();
    const double lbc = (c - b).squaredNorm();
    const double lca = ac.squaredNorm();
    if (lab >= lbc && lab >= lca) return on_segment(p, a, b, 0, 1);
    if (lbc >= lca) return on_segment(p, b, c, 1, 2);
    return on_segment(p, c, a, 2, 0);
  }

  std::array<double, 3> w;
  const Vec3 ap = p - a;
  const double d1 = ab.dot(ap);
  const double d2 = ac.dot(ap);
  const Vec3 bp = p - b;
  const double d3 = ab.dot(bp);
  const double d4 = ac.dot(bp);
  const Vec3 cp = p - c;
  const double d5 = ab.dot(cp);
  const double d6 = ac.dot(cp);
  const double vc = d1 * d4 - d3 * d2;
  const double vb = d5 * d2 - d1 * d6;
  const double va = d3 * d6 - d5 * d4;
  if (d1 <= 0.0 && d2 <= 0.0) {
    w = {1.0, 0.0, 0.0};
  } else if (d3 >= 0.0 && d4 <= d3) {
    w = {0.0, 1.0, 0.0};
  } else if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) {
    const double t = d1 / (d1 - d3);
    w = {1.0 - t, t, 0.0};
  } else if (d6 >= 0.0 && d5 <= d6) {
    w = {0.0, 0.0, 1.0};
  } else if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) {
    const double t = d2 / (d2 - d6);
    w = {1.0 - t, 0.0, t};
  } else if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
    const double t = (d4 - d3) / ((d4 - d3) + (d5 - d6));
    w = {0.0, 1.0 - t, t};
  } else {
    const double denom = 1.0 / (va + vb + vc);
    const double v = vb * denom;
    const double t = vc * denom;
    w = {1.0 - v - t, v, t};
  }
  double total = 0.0;
  for (double& x : w) {
    x = std::clamp(x, 0.0, 1.0);
    total += x;
  }
  for (double& x : w) x /= total;
  const Vec3 q = w[0] * a + w[1] * b + w[2] * c;
  return {w, (p - q).squaredNorm(), false};
}

Prolongation build_prolongation(const SurfaceGraph& fine, const VoronoiPartition& partition,
                                const std::vector<Vec3>& coarse_positions, std::span<const Edge> coarse_edges,
                                const HierarchyConfig& config) {
  const Index n_fine = fine.num_vertices();
  const Index n_coarse = partition.num_cells();
  if (static_cast<Index>(partition.seed_of.size()) != n_fine ||
      static_cast<Index>(coarse_positions.size()) != n_coarse)
    throw DimensionError("prolongation: partition, fine graph and coarse positions disagree in size");

  const double mean_edge = fine.num_edges() > 0 ? average_edge_length(fine) : 1.0;
  const double delta = 1e-12 * mean_edge;
  const double coincident2 = (1e-9 * mean_edge) * (1e-9 * mean_edge);

  std::vector<std::vector<Index>> adjacency(static_cast<std::size_t>(n_coarse));
  for (auto [a, b] : coarse_edges) {
    if (a < 0 || b < 0 || a >= n_coarse || b >= n_coarse)
      throw DimensionError("coarse edge references a missing coarse point");
    adjacency[a].push_back(b);
    adjacency[b].push_back(a);
  }
  for (auto& list : adjacency) std::sort(list.begin(), list.end());

  Prolongation result;
  result.triangles = candidate_triangles(coarse_edges);

  const bool uses_triangles = config.selection == SelectionVariant::VoronoiTriangle ||
                              config.selection == SelectionVariant::AllTriangles;
  // Triangles to search per coarse point.
  std::vector<std::vector<Triangle>> fan(static_cast<std::size_t>(uses_triangles ? n_coarse : 0));
  if (config.selection == SelectionVariant::VoronoiTriangle) {
    for (const Triangle& t : result.triangles)
      for (Index c : t) fan[c].push_back(t);
  } else if (config.selection == SelectionVariant::AllTriangles) {
    for (Index c = 0; c < n_coarse; ++c) {
      const auto& ring = adjacency[c];
      for (std::size_t i = 0; i < ring.size(); ++i)
        for (std::size_t j = i + 1; j < ring.size(); ++j) fan[c].push_back({c, ring[i], ring[j]});
    }
  }

  auto point_weights = [&](const Vec3& p, std::span<const Index> points) {
    return config.weighting == WeightingVariant::Uniform ? uniform(points)
                                                         : inverse_distance(p, points, coarse_positions, delta);
  };

  Rng rng(config.rng_seed);
  std::vector<Triplet> triplets;
  triplets.reserve(static_cast<std::size_t>(n_fine) * 3);
  std::vector<Index> neighborhood;
  for (Index v = 0; v < n_fine; ++v) {
    const Vec3& p = fine.position(v);
    const Index s = partition.seed_of[v];
    neighborhood.assign(1, s);
    neighborhood.insert(neighborhood.end(), adjacency[s].begin(), adjacency[s].end());

    Row row;
    switch (config.selection) {
      case SelectionVariant::VoronoiTriangle:
      case SelectionVariant::AllTriangles: {
        std::optional<TriangleProjection> best;
        Triangle best_tri{};
        for (const Triangle& t : fan[s]) {
          TriangleProjection proj =
              project_to_triangle(p, coarse_positions[t[0]], coarse_positions[t[1]], coarse_positions[t[2]]);
          if (proj.degenerate) continue;
          if (!best || proj.squared_distance < best->squared_distance) {
            best = proj;
            best_tri = t;
          }
        }
        const bool at_corner =
            best && *std::max_element(best->weights.begin(), best->weights.end()) >= 1.0 - 1e-12;
        if (best && config.spread_vertex_projections && at_corner && best->squared_distance > coincident2) {
          if (auto along = project_along_normal(p, coarse_positions[s], fan[s], coarse_positions)) {
            best_tri = along->first;
            best->weights = along->second;
          } else {
            best.reset();
          }
        }
        if (!best) {
          ++result.fallback_rows;
          row = inverse_distance(p, closest(p, neighborhood, coarse_positions, 3), coarse_positions, delta);
        } else if (config.weighting == WeightingVariant::Barycentric) {
          for (int k = 0; k < 3; ++k) row.emplace_back(best_tri[k], best->weights[k]);
        } else {
          row = point_weights(p, best_tri);
        }
        break;
      }
      case SelectionVariant::Closest2:
      case SelectionVariant::Closest3:
      case SelectionVariant::Closest4: {
        const std::size_t k = config.selection == SelectionVariant::Closest2   ? 2
                              : config.selection == SelectionVariant::Closest3 ? 3
                                                                               : 4;
        row = point_weights(p, closest(p, neighborhood, coarse_positions, k));
        break;
      }
      case SelectionVariant::Random3: {
        const std::size_t k = std::min<std::size_t>(3, neighborhood.size());
        for (std::size_t i = 0; i < k; ++i) {
          const auto j = i + rng.below(neighborhood.size() - i);
          std::swap(neighborhood[i], neighborhood[j]);
        }
        row = point_weights(p, std::span<const Index>(neighborhood.data(), k));
        break;
      }
      case SelectionVariant::ClosestVertex:
        row = uniform(closest(p, neighborhood, coarse_positions, 1));
        break;
    }

    double total = 0.0;
    for (auto& [c, w] : row) {
      if (w < kDropTolerance) w = 0.0;
      total += w;
    }
    for (auto& [c, w] : row)
      if (w > 0.0) triplets.push_back({v, c, w / total});
  }

  result.matrix = SparseMatrix::from_triplets(n_fine, n_coarse, triplets);
  result.fallback_fraction =
      n_fine > 0 ? static_cast<double>(result.fallback_rows) / static_cast<double>(n_fine) : 0.0;
  return result;
}

}  // namespace gravomg
