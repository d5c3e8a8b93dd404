#include "gravomg/voronoi.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <queue>
#include <string>
#include <tuple>

#include "gravomg/errors.hpp"

namespace gravomg {

VoronoiPartition graph_voronoi(const SurfaceGraph& graph, std::span<const Index> seeds) {
  const Index n = graph.num_vertices();
  if (seeds.empty()) throw DimensionError("graph Voronoi diagram needs at least one seed");

  VoronoiPartition part;
  part.seeds.assign(seeds.begin(), seeds.end());
  part.seed_of.assign(static_cast<std::size_t>(n), -1);
  part.dist_of.assign(static_cast<std::size_t>(n), std::numeric_limits<double>::infinity());

  // (distance, coarse index, vertex): lexicographic order gives the tie rule.
  using Entry = std::tuple<double, Index, Index>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> queue;
  for (Index c = 0; c < part.num_cells(); ++c) {
    const Index s = part.seeds[c];
    if (s < 0 || s >= n) throw DimensionError("seed " + std::to_string(s) + " out of range");
    if (part.seed_of[s] >= 0) throw DimensionError("seed " + std::to_string(s) + " listed twice");
    part.seed_of[s] = c;
    part.dist_of[s] = 0.0;
    queue.emplace(0.0, c, s);
  }

  // Seeds keep their own cell even when another seed is at distance zero.
  std::vector<bool> settled(static_cast<std::size_t>(n), false);
  std::vector<bool> is_seed(static_cast<std::size_t>(n), false);
  for (Index s : part.seeds) is_seed[s] = true;
  while (!queue.empty()) {
    auto [d, c, u] = queue.top();
    queue.pop();
    if (settled[u] || d != part.dist_of[u] || c != part.seed_of[u]) continue;
    settled[u] = true;
    for (Index v : graph.neighbors(u)) {
      if (settled[v] || is_seed[v]) continue;
      const double nd = d + graph.edge_length(u, v);
      if (nd < part.dist_of[v] || (nd == part.dist_of[v] && c < part.seed_of[v])) {
        part.dist_of[v] = nd;
        part.seed_of[v] = c;
        queue.emplace(nd, c, v);
      }
    }
  }

  for (Index v = 0; v < n; ++v) {
    if (part.seed_of[v] >= 0) continue;
    ++part.unreachable;
    double best = std::numeric_limits<double>::infinity();
    for (Index c = 0; c < part.num_cells(); ++c) {
      const double d = (graph.position(v) - graph.position(part.seeds[c])).norm();
      if (d < best) {
        best = d;
        part.seed_of[v] = c;
      }
    }
    part.dist_of[v] = best;
  }
  return part;
}

std::vector<Edge> voronoi_adjacency(const SurfaceGraph& graph, const VoronoiPartition& partition) {
  std::vector<Edge> coarse;
  for (auto [u, v] : graph.edges()) {
    const Index a = partition.seed_of[u];
    const Index b = partition.seed_of[v];
    if (a != b) coarse.emplace_back(std::min(a, b), std::max(a, b));
  }
  std::sort(coarse.begin(), coarse.end());
  coarse.erase(std::unique(coarse.begin(), coarse.end()), coarse.end());
  return coarse;
}

std::vector<Triangle> candidate_triangles(std::span<const Edge> edges) {
  Index n = 0;
  for (auto [a, b] : edges) n = std::max({n, a + 1, b + 1});
  // Forward adjacency: only neighbours with a larger index.
  std::vector<std::vector<Index>> higher(static_cast<std::size_t>(n));
  for (auto [a, b] : edges) {
    if (a == b) continue;
    higher[std::min(a, b)].push_back(std::max(a, b));
  }
  for (auto& list : higher) {
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
  }

  std::vector<Triangle> triangles;
  std::vector<Index> common;
  for (Index i = 0; i < n; ++i) {
    for (Index j : higher[i]) {
      common.clear();
      std::set_intersection(higher[i].begin(), higher[i].end(), higher[j].begin(), higher[j].end(),
                            std::back_inserter(common));
      for (Index k : common) triangles.push_back({i, j, k});
    }
  }
  // Generated in (i, j, k) lexicographic order already.
  return triangles;
}

std::vector<Vec3> shift_seeds(const VoronoiPartition& partition, const std::vector<Vec3>& fine_positions) {
  std::vector<Vec3> sum(static_cast<std::size_t>(partition.num_cells()), Vec3::Zero());
  std::vector<Index> count(static_cast<std::size_t>(partition.num_cells()), 0);
  for (std::size_t v = 0; v < fine_positions.size(); ++v) {
    sum[partition.seed_of[v]] += fine_positions[v];
    ++count[partition.seed_of[v]];
  }
  for (std::size_t c = 0; c < sum.size(); ++c) {
    if (count[c] > 0)
      sum[c] /= static_cast<double>(count[c]);
    else
      sum[c] = fine_positions[partition.seeds[c]];
  }
  return sum;
}

}  // namespace gravomg
