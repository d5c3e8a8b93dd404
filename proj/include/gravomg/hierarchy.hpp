#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "gravomg/hierarchy_config.hpp"
#include "gravomg/mesh_io.hpp"
#include "gravomg/prolongation.hpp"
#include "gravomg/sparse.hpp"
#include "gravomg/voronoi.hpp"

namespace gravomg {

/// One row of the per-level report. Row l describes how level l was built:
/// its size, its edges, the candidate triangles on its points, the fallback
/// share of P_{l-1} (the rows of level l-1), and the seconds spent. Level 1
/// is the input and reports zero triangles, fallback and time.
struct LevelStats {
  Index vertices = 0;
  Index edges = 0;
  Index triangles = 0;
  double fallback_fraction = 0.0;
  double seconds = 0.0;
  std::size_t unreachable = 0;
};

struct Hierarchy {
  std::vector<SurfaceGraph> levels;            // levels[0] is the input graph
  std::vector<SparseMatrix> prolongations;     // prolongations[l]: n_l x n_{l+1}
  std::vector<double> fallback_fraction;       // per prolongation
  std::vector<std::vector<Triangle>> triangles;  // per level; empty for the input
  std::vector<LevelStats> stats;                 // per level

  Index num_levels() const { return static_cast<Index>(levels.size()); }
};

/// Seed selection for one level according to config.sampling.
std::vector<Index> select_seeds(const SurfaceGraph& graph, const HierarchyConfig& config, std::size_t level);

/// Coarsens level by level (sample, Voronoi cells, Voronoi adjacency,
/// optional seed shift, prolongation) until a level has at most
/// config.coarsest_size points or sampling stops shrinking the level.
Hierarchy build_hierarchy(SurfaceGraph graph, const HierarchyConfig& config);

/// CSV `level,n,edges,triangles,fallback_fraction,seconds` with 1-based
/// levels. Seconds are rounded to milliseconds, or written as 0 when
/// `timings` is false.
void write_levels_csv(const Hierarchy& hierarchy, std::ostream& out, bool timings = true);

}  // namespace gravomg
