// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Cholesky>

#include "cli.hpp"
#include "gravomg/hierarchy.hpp"
#include "gravomg/operators.hpp"
#include "gravomg/prolongation.hpp"
#include "gravomg/rng.hpp"
#include "gravomg/sampling.hpp"
#include "gravomg/shapes.hpp"
#include "gravomg/solver.hpp"
#include "gravomg/voronoi.hpp"
#include "support/corpus.hpp"
#include "support/oracles.hpp"

using namespace gravomg;
namespace fs = std::filesystem;

namespace {

// Tolerances and limits, fixed here for every run.
constexpr double kRowSumTolerance = 1e-9;
constexpr std::size_t kMaxRowEntries = 3;
constexpr double kInvariantSeconds = 30.0;
constexpr double kPoissonEta = 1e-6;
constexpr double kSmoothingAlpha = 1e-3;
constexpr double kSolveTolerance = 1e-4;
constexpr double kOracleError = 1e-3;
constexpr Index kOracleMaxVertices = 5000;
constexpr Index kCoarsest = 100;
constexpr int kMaxMultigridIterations = 30;
constexpr int kRelaxationSweeps = 100;
constexpr double kRelaxationTarget = 1e-2;
constexpr double kMinRatio = 1.0 / 16.0;
constexpr double kMaxRatio = 1.0 / 3.0;
constexpr int kMaxIterationSpread = 5;
constexpr double kMaxFallback = 0.05;
constexpr Index kVoronoiMaxVertices = 500;
constexpr Index kTriangleMaxCoarse = 200;
constexpr double kTripleProductTolerance = 1e-12;
constexpr int kProjectionCases = 1000;
constexpr double kProjectionGap = 1e-6;
constexpr double kRandomSelectionFactor = 1.5;
constexpr double kAblationSmoothingAlpha = 1.0;
constexpr int kDeterminismRepeats = 3;

struct Verdict {
  bool pass;
  std::string detail;
};

std::vector<double> normals(Index n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> y(static_cast<std::size_t>(n));
  for (double& v : y) v = rng.normal();
  return y;
}

HierarchyConfig corpus_config() {
  HierarchyConfig config;
  config.coarsest_size = kCoarsest;
  return config;
}

const std::vector<corpus::Entry>& entries() {
  static const std::vector<corpus::Entry> all = corpus::all();
  return all;
}

struct Built {
  std::string name;
  bool is_mesh;
  SurfaceData data;
  SurfaceGraph graph;
  Hierarchy hierarchy;
};

// Hierarchies of the whole corpus, built once.
const std::vector<Built>& corpus_hierarchies() {
  static const std::vector<Built> built = [] {
    std::vector<Built> out;
    for (const corpus::Entry& e : entries()) {
      SurfaceGraph g = surface_graph(e.data);
      Hierarchy h = build_hierarchy(g, corpus_config());
      out.push_back({e.name, std::holds_alternative<TriangleMesh>(e.data), e.data, std::move(g), std::move(h)});
    }
    return out;
  }();
  return built;
}

std::string fmt(const char* pattern, auto... values) {
  char buffer[512];
  std::snprintf(buffer, sizeof buffer, pattern, values...);
  return buffer;
}

// --- criteria ---------------------------------------------------------------

Verdict prolongation_invariants() {
  const auto start = std::chrono::steady_clock::now();
  int meshes = 0, clouds = 0;
  std::size_t rows = 0, bad = 0;
  double worst = 0.0;
  for (const Built& b : corpus_hierarchies()) {
    (b.is_mesh ? meshes : clouds)++;
    for (const SparseMatrix& p : b.hierarchy.prolongations) {
      const std::vector<double> ones = spmv(p, std::vector<double>(static_cast<std::size_t>(p.cols()), 1.0));
      for (Index r = 0; r < p.rows(); ++r) {
        ++rows;
        auto vals = p.row_values(r);
        double sum = 0.0;
        bool ok = !vals.empty() && vals.size() <= kMaxRowEntries;
        for (double v : vals) {
          ok = ok && v >= 0.0;
          sum += v;
        }
        worst = std::max({worst, std::abs(sum - 1.0), std::abs(ones[r] - 1.0)});
        if (!ok || std::abs(sum - 1.0) > kRowSumTolerance || std::abs(ones[r] - 1.0) > kRowSumTolerance) ++bad;
      }
    }
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const bool pass = meshes >= 10 && clouds >= 3 && bad == 0 && seconds < kInvariantSeconds;
  return {pass, fmt("%d meshes, %d clouds, %zu rows, %zu bad, max |sum-1|=%.2e, %.1fs", meshes, clouds, rows, bad,
                    worst, seconds)};
}

double mass_relative_error(const std::vector<double>& x, const Eigen::VectorXd& exact, const std::vector<double>& m) {
  double num = 0.0, den = 0.0;
  for (Index i = 0; i < exact.size(); ++i) {
    num += m[i] * (x[i] - exact[i]) * (x[i] - exact[i]);
    den += m[i] * exact[i] * exact[i];
  }
  return std::sqrt(num / den);
}

Verdict oracle_equivalence() {
  int systems = 0;
  double worst = 0.0;
  std::string worst_name;
  bool all_converged = true;
  for (const Built& b : corpus_hierarchies()) {
    if (!b.is_mesh || b.graph.num_vertices() > kOracleMaxVertices) continue;
    OperatorPair ops = surface_operators(b.data, b.graph);
    const auto y = normals(b.graph.num_vertices(), 7);
    for (const LinearSystem& sys : {assemble_poisson(ops, kPoissonEta, y), assemble_smoothing(ops, kSmoothingAlpha, y)}) {
      MultigridOperator op = setup(sys.matrix, b.hierarchy, ops.mass);
      SolverConfig config;
      config.epsilon = kSolveTolerance;
      auto [x, report] = solve(op, sys.rhs, {}, config);
      all_converged = all_converged && report.converged;
      const Eigen::VectorXd exact = oracle::dense(sys.matrix).llt().solve(
          Eigen::Map<const Eigen::VectorXd>(sys.rhs.data(), static_cast<Index>(sys.rhs.size())));
      const double err = mass_relative_error(x, exact, ops.mass);
      if (err > worst) {
        worst = err;
        worst_name = b.name;
      }
      ++systems;
    }
  }
  return {systems > 0 && all_converged && worst < kOracleError,
          fmt("%d systems, max mass-weighted relative error %.2e (%s)", systems, worst, worst_name.c_str())};
}

Verdict multigrid_speed() {
  const TriangleMesh mesh = shapes::icosphere(4);
  OperatorPair ops = mesh_operators(mesh);
  LinearSystem sys = assemble_poisson(ops, kPoissonEta, normals(mesh.num_vertices(), 1));
  Hierarchy h = build_hierarchy(mesh_to_graph(mesh), corpus_config());
  MultigridOperator op = setup(sys.matrix, h, ops.mass);
  SolverConfig config;
  config.epsilon = kSolveTolerance;
  auto [x, report] = solve(op, sys.rhs, {}, config);

  std::vector<double> relaxed(static_cast<std::size_t>(mesh.num_vertices()), 0.0);
  gauss_seidel(sys.matrix, relaxed, sys.rhs, kRelaxationSweeps);
  const double plain = residual_norm(op, relaxed, sys.rhs, NormKind::MassWeighted) /
                       vector_norm(op, sys.rhs, NormKind::MassWeighted);
  return {report.converged && report.iterations <= kMaxMultigridIterations && plain > kRelaxationTarget,
          fmt("n=%td levels=%zu, multigrid %d iterations; %d Gauss-Seidel sweeps reach %.3e", mesh.num_vertices(),
              op.num_levels(), report.iterations, kRelaxationSweeps, plain)};
}

Verdict decay_rate() {
  double lo = 1.0, hi = 0.0;
  std::size_t ratios = 0;
  for (const Built& b : corpus_hierarchies()) {
    const auto& levels = b.hierarchy.levels;
    for (std::size_t l = 0; l + 1 < levels.size(); ++l) {
      const double r = double(levels[l + 1].num_vertices()) / double(levels[l].num_vertices());
      lo = std::min(lo, r);
      hi = std::max(hi, r);
      ++ratios;
    }
  }
  return {ratios > 0 && lo >= kMinRatio && hi <= kMaxRatio,
          fmt("%zu level ratios in [%.4f, %.4f]", ratios, lo, hi)};
}

Verdict grid_independence() {
  std::vector<int> counts;
  for (int subdivisions : {3, 4, 5}) {
    const TriangleMesh mesh = shapes::icosphere(subdivisions);
    OperatorPair ops = mesh_operators(mesh);
    LinearSystem sys = assemble_poisson(ops, kPoissonEta, normals(mesh.num_vertices(), 1));
    MultigridOperator op = setup(sys.matrix, build_hierarchy(mesh_to_graph(mesh), corpus_config()), ops.mass);
    SolverConfig config;
    config.epsilon = kSolveTolerance;
    auto [x, report] = solve(op, sys.rhs, {}, config);
    counts.push_back(report.converged ? report.iterations : 1 << 20);
  }
  const int spread = *std::max_element(counts.begin(), counts.end()) - *std::min_element(counts.begin(), counts.end());
  return {spread <= kMaxIterationSpread,
          fmt("iterations at subdivisions 3/4/5: %d/%d/%d", counts[0], counts[1], counts[2])};
}

Verdict fallback_rate() {
  double worst = 0.0;
  std::string worst_name;
  for (const Built& b : corpus_hierarchies()) {
    if (!b.is_mesh) continue;
    for (double f : b.hierarchy.fallback_fraction)
      if (f >= worst) {
        worst = f;
        worst_name = b.name;
      }
  }
  return {worst < kMaxFallback, fmt("max fallback fraction %.4f (%s)", worst, worst_name.c_str())};
}

Verdict sub_oracles() {
  std::vector<std::string> failures;
  // Voronoi cells.
  std::size_t vertices = 0;
  for (const SurfaceGraph& g : {mesh_to_graph(shapes::perturbed(shapes::icosphere(2), 0.2, 21)),
                                mesh_to_graph(shapes::perturbed(shapes::grid(20, 20), 0.2, 22)),
                                knn_graph(shapes::fibonacci_sphere(kVoronoiMaxVertices), 6)}) {
    if (g.num_vertices() > kVoronoiMaxVertices) failures.push_back("voronoi graph too large");
    const auto seeds = sample_points(g, 1.0 / 8.0, 2);
    if (graph_voronoi(g, seeds).seed_of != oracle::voronoi_cells(g, seeds)) failures.push_back("voronoi");
    vertices += static_cast<std::size_t>(g.num_vertices());
  }
  // Candidate triangles.
  std::size_t triangles = 0;
  for (std::uint64_t seed : {31u, 32u, 33u}) {
    SurfaceGraph g = mesh_to_graph(shapes::perturbed(shapes::icosphere(3), 0.2, seed));
    auto cells = graph_voronoi(g, sample_points(g, 1.0 / 8.0, 2));
    if (cells.num_cells() > kTriangleMaxCoarse) failures.push_back("too many coarse points");
    auto edges = voronoi_adjacency(g, cells);
    auto got = candidate_triangles(edges);
    if (std::set<Triangle>(got.begin(), got.end()) != oracle::triangles_by_triples(edges) ||
        got.size() != oracle::triangles_by_triples(edges).size())
      failures.push_back("triangles");
    triangles += got.size();
  }
  // Triple product.
  double worst_product = 0.0;
  for (unsigned seed = 0; seed < 5; ++seed) {
    const Eigen::MatrixXd p = oracle::random_matrix(60 + seed, 15 + seed, 0.2, seed);
    const Eigen::MatrixXd a = oracle::random_spd(60 + seed, seed + 100);
    const Eigen::MatrixXd expect = p.transpose() * a * p;
    const Eigen::MatrixXd got = oracle::dense(triple_product(oracle::sparse(p), oracle::sparse(a)));
    worst_product = std::max(worst_product, (got - expect).norm() / expect.norm());
  }
  if (worst_product > kTripleProductTolerance) failures.push_back("triple product");
  // Closest point on a triangle.
  std::mt19937 gen(7);
  std::uniform_real_distribution<double> coord(-1.0, 1.0);
  auto point = [&] { return Vec3(coord(gen), coord(gen), coord(gen)); };
  double worst_gap = 0.0;
  for (int i = 0; i < kProjectionCases; ++i) {
    const Vec3 a = point(), b = point(), c = point(), p = 2.0 * point();
    const double got = std::sqrt(project_to_triangle(p, a, b, c).squared_distance);
    worst_gap = std::max(worst_gap, std::abs(got - std::sqrt(oracle::zoom_search_distance(p, a, b, c))));
  }
  if (worst_gap > kProjectionGap) failures.push_back("projection");

  std::string detail = fmt("voronoi on %zu vertices, %zu triangles, triple product %.1e, projection gap %.1e",
                           vertices, triangles, worst_product, worst_gap);
  for (const auto& f : failures) detail += "; mismatch: " + f;
  return {failures.empty(), detail};
}

int ablation_iterations(const SurfaceGraph& graph, const LinearSystem& sys, const std::vector<double>& mass,
                        SelectionVariant selection, WeightingVariant weighting) {
  HierarchyConfig config = corpus_config();
  config.selection = selection;
  config.weighting = weighting;
  MultigridOperator op = setup(sys.matrix, build_hierarchy(graph, config), mass);
  SolverConfig sc;
  sc.epsilon = kSolveTolerance;
  sc.max_iterations = 1000;
  return solve(op, sys.rhs, {}, sc).second.iterations;
}

Verdict ablation_direction() {
  const TriangleMesh mesh = shapes::icosphere(4);
  const SurfaceGraph graph = mesh_to_graph(mesh);
  OperatorPair ops = mesh_operators(mesh);
  const auto y = normals(mesh.num_vertices(), 1);
  bool pass = true;
  std::string detail;
  for (const auto& [name, sys] : {std::pair{"poisson", assemble_poisson(ops, kPoissonEta, y)},
                                  std::pair{"smoothing", assemble_smoothing(ops, kAblationSmoothingAlpha, y)}}) {
    const int tri = ablation_iterations(graph, sys, ops.mass, SelectionVariant::VoronoiTriangle,
                                        WeightingVariant::Barycentric);
    const int rnd = ablation_iterations(graph, sys, ops.mass, SelectionVariant::Random3, WeightingVariant::Barycentric);
    const int uni = ablation_iterations(graph, sys, ops.mass, SelectionVariant::VoronoiTriangle,
                                        WeightingVariant::Uniform);
    pass = pass && rnd >= kRandomSelectionFactor * tri && uni >= tri;
    detail += fmt("%s%s: voronoi_triangle %d, random3 %d, uniform %d", detail.empty() ? "" : "; ", name, tri, rnd, uni);
  }
  return {pass, detail};
}

std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::directory_iterator(dir)) files[e.path().filename().string()] = oracle::read_file(e.path());
  return files;
}

Verdict determinism() {
  const fs::path dir = oracle::scratch_dir("acceptance_determinism");
  const fs::path mesh = dir / "mesh.obj";
  write_obj(shapes::perturbed(shapes::icosphere(4), 0.1, 5), mesh);
  const fs::path cloud = dir / "cloud.ply";
  {
    const PointCloud pc = shapes::random_torus_points(1.0, 0.35, 3000, 4);
    std::string text = "ply\nformat ascii 1.0\nelement vertex " + std::to_string(pc.positions.size()) +
                       "\nproperty double x\nproperty double y\nproperty double z\nend_header\n";
    for (const Vec3& p : pc.positions) text += fmt("%.17g %.17g %.17g\n", p.x(), p.y(), p.z());
    oracle::write_file(cloud, text);
  }

  const std::vector<std::vector<std::string>> runs{
      {"hierarchy", mesh.string(), "--coarsest", "100", "--export-levels"},
      {"solve", mesh.string(), "--coarsest", "100", "--problem", "poisson", "--export-matrices", "--seed", "3"},
      {"solve", cloud.string(), "--coarsest", "100", "--problem", "smoothing", "--sampling", "random", "--seed", "4"},
      {"ablate", mesh.string(), "--coarsest", "100", "--axis", "selection", "--seed", "5"},
      {"oracle", mesh.string(), "--problem", "bilaplacian"},
  };
  int identical = 0;
  std::string detail;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const fs::path out = dir / ("run" + std::to_string(i));
    std::vector<std::string> args = runs[i];
    args.insert(args.end(), {"--zero-timings", "--out", out.string()});
    std::ostringstream first_out, ignore;
    if (cli::run(args, first_out, ignore) != 0) {
      detail += " run " + std::to_string(i) + " failed;";
      continue;
    }
    const auto reference = snapshot(out);
    bool same = true;
    for (int k = 1; k < kDeterminismRepeats; ++k) {
      // Alternate between the original flags and the saved manifest.
      std::vector<std::string> again =
          k % 2 ? std::vector<std::string>{runs[i][0], "--manifest", (out / "manifest.json").string()} : args;
      std::ostringstream again_out;
      same = same && cli::run(again, again_out, ignore) == 0 && again_out.str() == first_out.str() &&
             snapshot(out) == reference;
    }
    if (same) ++identical;
    else detail += " run " + std::to_string(i) + " differs;";
  }
  fs::remove_all(dir);
  return {identical == static_cast<int>(runs.size()),
          fmt("%d/%zu manifests byte-identical over %d runs each", identical, runs.size(), kDeterminismRepeats) +
              detail};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"prolongation invariants", prolongation_invariants},
      {"dense oracle equivalence", oracle_equivalence},
      {"multigrid speed", multigrid_speed},
      {"level decay rate", decay_rate},
      {"grid independence", grid_independence},
      {"fallback rate", fallback_rate},
      {"sub-oracle equivalences", sub_oracles},
      {"ablation direction", ablation_direction},
      {"determinism", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s %zu %s: %s\n", v.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), v.detail.c_str());
    std::fflush(stdout);
    failed += v.pass ? 0 : 1;
  }
  return failed == 0 ? 0 : 1;
}
