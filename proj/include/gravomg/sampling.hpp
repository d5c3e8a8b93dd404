#pragma once

#include <cstdint>
#include <vector>

#include "gravomg/mesh_io.hpp"

namespace gravomg {

/// Exclusion radius phi^(-1/3) * mean_edge_length.
double sampling_radius(double phi, double mean_edge_length);

/// max(1, ceil(phi * n))
Index target_sample_count(Index n, double phi);

/// Uniform greedy sampling. One sweep in ascending vertex order; each
/// eligible vertex is selected and every vertex at graph distance < r from
/// it (searched over paths of at most `ring_limit` edges) becomes
/// ineligible. r = sampling_radius(phi, average edge length). Graphs without
/// edges return every vertex. Indices come back in selection order.
std::vector<Index> sample_points(const SurfaceGraph& graph, double phi, int ring_limit);

/// target_sample_count(n, phi) vertices drawn uniformly without
/// replacement, returned ascending. Same seed, same set.
std::vector<Index> sample_random(const SurfaceGraph& graph, double phi, std::uint64_t seed);

/// Farthest point sampling in graph distance, starting at vertex 0.
/// Unreachable vertices count as infinitely far, so every connected
/// component gets a sample before any component gets a second one.
std::vector<Index> sample_fps(const SurfaceGraph& graph, double phi);

/// Greedy maximal independent set of the `hops`-hop graph, ascending order.
std::vector<Index> greedy_mis(const SurfaceGraph& graph, int hops);

/// greedy_mis with the smallest hop count (from 1) whose result has at most
/// target_sample_count(n, phi) vertices, or one sample per connected
/// component when no hop count gets there.
std::vector<Index> sample_mis(const SurfaceGraph& graph, double phi);

}  // namespace gravomg
