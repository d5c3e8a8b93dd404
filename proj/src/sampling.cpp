#include "gravomg/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <queue>

#include "gravomg/rng.hpp"

namespace gravomg {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Number of connected components, by union of BFS sweeps.
Index count_components(const SurfaceGraph& graph) {
  const Index n = graph.num_vertices();
  std::vector<bool> seen(static_cast<std::size_t>(n), false);
  std::vector<Index> stack;
  Index components = 0;
  for (Index start = 0; start < n; ++start) {
    if (seen[start]) continue;
    ++components;
    seen[start] = true;
    stack.push_back(start);
    while (!stack.empty()) {
      Index u = stack.back();
      stack.pop_back();
      for (Index v : graph.neighbors(u)) {
        if (!seen[v]) {
          seen[v] = true;
          stack.push_back(v);
        }
      }
    }
  }
  return components;
}

// Lowers `dist` to graph distances from `source`, never raising an entry.
void relax_from(const SurfaceGraph& graph, Index source, std::vector<double>& dist) {
  using Entry = std::pair<double, Index>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> queue;
  dist[source] = 0.0;
  queue.emplace(0.0, source);
  while (!queue.empty()) {
    auto [d, u] = queue.top();
    queue.pop();
    if (d > dist[u]) continue;
    for (Index v : graph.neighbors(u)) {
      const double nd = d + graph.edge_length(u, v);
      if (nd < dist[v]) {
        dist[v] = nd;
        queue.emplace(nd, v);
      }
    }
  }
}

}  // namespace

double sampling_radius(double phi, double mean_edge_length) {
  return std::pow(phi, -1.0 / 3.0) * mean_edge_length;
}

Index target_sample_count(Index n, double phi) {
  const auto target = static_cast<Index>(std::ceil(phi * static_cast<double>(n)));
  return std::clamp<Index>(target, 1, std::max<Index>(n, 1));
}

std::vector<Index> sample_points(const SurfaceGraph& graph, double phi, int ring_limit) {
  const Index n = graph.num_vertices();
  std::vector<Index> samples;
  if (n == 0) return samples;
  if (graph.num_edges() == 0) {
    samples.resize(static_cast<std::size_t>(n));
    std::iota(samples.begin(), samples.end(), Index{0});
    return samples;
  }
  const double radius = sampling_radius(phi, average_edge_length(graph));

  std::vector<bool> eligible(static_cast<std::size_t>(n), true);
  // Hop-limited Bellman-Ford around each selected vertex. `best` is reset
  // through `touched` so each search costs only its neighbourhood.
  std::vector<double> best(static_cast<std::size_t>(n), kInf);
  std::vector<Index> touched;
  std::vector<std::pair<Index, double>> frontier, next;
  std::vector<int> queued(static_cast<std::size_t>(n), -1);

  for (Index p = 0; p < n; ++p) {
    if (!eligible[p]) continue;
    samples.push_back(p);
    eligible[p] = false;

    best[p] = 0.0;
    touched.assign(1, p);
    frontier.assign(1, {p, 0.0});
    for (int hop = 1; hop <= ring_limit && !frontier.empty(); ++hop) {
      std::vector<Index> improved;
      for (auto [u, du] : frontier) {
        for (Index v : graph.neighbors(u)) {
          const double nd = du + graph.edge_length(u, v);
          if (nd >= radius || nd >= best[v]) continue;
          if (best[v] == kInf) touched.push_back(v);
          best[v] = nd;
          if (queued[v] != hop) {
            queued[v] = hop;
            improved.push_back(v);
          }
        }
      }
      next.clear();
      for (Index v : improved) next.emplace_back(v, best[v]);
      std::swap(frontier, next);
    }
    for (Index v : touched) {
      eligible[v] = false;
      best[v] = kInf;
      queued[v] = -1;
    }
  }
  return samples;
}

std::vector<Index> sample_random(const SurfaceGraph& graph, double phi, std::uint64_t seed) {
  const Index n = graph.num_vertices();
  if (n == 0) return {};
  const Index count = target_sample_count(n, phi);
  std::vector<Index> pool(static_cast<std::size_t>(n));
  std::iota(pool.begin(), pool.end(), Index{0});
  Rng rng(seed);
  // Partial Fisher-Yates.
  for (Index i = 0; i < count; ++i) {
    const auto j = i + static_cast<Index>(rng.below(static_cast<std::uint64_t>(n - i)));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(static_cast<std::size_t>(count));
  std::sort(pool.begin(), pool.end());
  return pool;
}

std::vector<Index> sample_fps(const SurfaceGraph& graph, double phi) {
  const Index n = graph.num_vertices();
  if (n == 0) return {};
  const Index count = target_sample_count(n, phi);
  std::vector<double> dist(static_cast<std::size_t>(n), kInf);
  std::vector<bool> chosen(static_cast<std::size_t>(n), false);
  std::vector<Index> samples;
  Index next = 0;
  while (static_cast<Index>(samples.size()) < count) {
    samples.push_back(next);
    chosen[next] = true;
    relax_from(graph, next, dist);
    // Farthest unchosen vertex; the strict comparison keeps the lowest index on ties.
    Index far = -1;
    for (Index v = 0; v < n; ++v) {
      if (chosen[v]) continue;
      if (far < 0 || dist[v] > dist[far]) far = v;
    }
    if (far < 0) break;
    next = far;
  }
  return samples;
}

std::vector<Index> greedy_mis(const SurfaceGraph& graph, int hops) {
  const Index n = graph.num_vertices();
  std::vector<bool> blocked(static_cast<std::size_t>(n), false);
  std::vector<int> depth(static_cast<std::size_t>(n), -1);
  std::vector<Index> samples, visited, layer, next_layer;
  for (Index v = 0; v < n; ++v) {
    if (blocked[v]) continue;
    samples.push_back(v);
    blocked[v] = true;
    depth[v] = 0;
    visited.assign(1, v);
    layer.assign(1, v);
    for (int h = 1; h <= hops && !layer.empty(); ++h) {
      next_layer.clear();
      for (Index u : layer) {
        for (Index w : graph.neighbors(u)) {
          if (depth[w] >= 0) continue;
          depth[w] = h;
          blocked[w] = true;
          visited.push_back(w);
          next_layer.push_back(w);
        }
      }
      std::swap(layer, next_layer);
    }
    for (Index u : visited) depth[u] = -1;
  }
  return samples;
}

std::vector<Index> sample_mis(const SurfaceGraph& graph, double phi) {
  const Index n = graph.num_vertices();
  if (n == 0) return {};
  const Index target = target_sample_count(n, phi);
  const Index floor = count_components(graph);
  std::vector<Index> samples;
  for (int hops = 1;; ++hops) {
    samples = greedy_mis(graph, hops);
    const auto size = static_cast<Index>(samples.size());
    if (size <= target || size <= floor || hops >= n) return samples;
  }
}

}  // namespace gravomg
