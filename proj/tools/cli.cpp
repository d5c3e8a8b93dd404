#include "cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "gravomg/errors.hpp"
#include "gravomg/hierarchy.hpp"
#include "gravomg/rng.hpp"

namespace gravomg::cli {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

class OracleSizeError : public Error {
public:
  using Error::Error;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

double shown_seconds(const RunManifest& m, double seconds) {
  return m.zero_timings ? 0.0 : std::round(seconds * 1000.0) / 1000.0;
}

std::string format(const char* pattern, auto... values) {
  char buffer[256];
  std::snprintf(buffer, sizeof buffer, pattern, values...);
  return buffer;
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  return out;
}

void write_vector(const fs::path& path, std::span<const double> values) {
  auto out = open_output(path);
  for (double v : values) out << format("%.17g\n", v);
}

std::vector<double> read_vector(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  std::vector<double> values;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream tokens(line);
    double v;
    if (!(tokens >> v)) {
      std::string rest;
      if (std::istringstream(line) >> rest) throw ParseError("expected a number", line_no);
      continue;
    }
    std::string extra;
    if (tokens >> extra) throw ParseError("expected one number per line", line_no);
    values.push_back(v);
  }
  return values;
}

std::vector<double> right_hand_function(const RunManifest& m, Index n) {
  if (!m.input_function.empty()) {
    std::vector<double> y = read_vector(m.input_function);
    if (static_cast<Index>(y.size()) != n)
      throw DimensionError("input function has " + std::to_string(y.size()) + " values for " + std::to_string(n) +
                           " vertices");
    return y;
  }
  Rng rng(m.seed);
  std::vector<double> y(static_cast<std::size_t>(n));
  for (double& v : y) v = rng.normal();
  return y;
}

struct Problem {
  SurfaceData data;
  SurfaceGraph graph;
  OperatorPair ops;
  LinearSystem system;
};

Problem load_problem(const RunManifest& m) {
  Problem p;
  p.data = load_surface(m.input);
  p.graph = surface_graph(p.data, m.knn);
  p.ops = surface_operators(p.data, p.graph);
  p.system = assemble(p.ops, m.problem, right_hand_function(m, p.graph.num_vertices()));
  if (!m.system_matrix.empty()) {
    SparseMatrix a = read_matrix_market(m.system_matrix);
    if (a.rows() != p.graph.num_vertices() || a.cols() != p.graph.num_vertices())
      throw DimensionError("system matrix is " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                           ", input has " + std::to_string(p.graph.num_vertices()) + " vertices");
    p.system.matrix = std::move(a);
  }
  return p;
}

void export_levels(const Hierarchy& h, const SurfaceData& data, const fs::path& dir) {
  for (std::size_t l = 0; l < h.levels.size(); ++l) {
    TriangleMesh mesh{h.levels[l].positions(), {}};
    if (l == 0) {
      if (const auto* input = std::get_if<TriangleMesh>(&data)) mesh.faces = input->faces;
    } else {
      mesh.faces.assign(h.triangles[l].begin(), h.triangles[l].end());
    }
    write_obj(mesh, dir / ("level_" + std::to_string(l + 1) + ".obj"));
  }
}

void write_levels(const RunManifest& m, const Hierarchy& h, const fs::path& dir) {
  auto out = open_output(dir / "levels.csv");
  write_levels_csv(h, out, !m.zero_timings);
}

std::string summary_line(const RunManifest& m, double hier, double setup, double solve, int iterations,
                         bool converged) {
  return format("hier_s=%.3f setup_s=%.3f solve_s=%.3f iters=%d converged=%s", shown_seconds(m, hier),
                shown_seconds(m, setup), shown_seconds(m, solve), iterations, converged ? "true" : "false");
}

int cmd_hierarchy(const RunManifest& m, std::ostream& out) {
  const fs::path dir = m.output_dir;
  SurfaceData data = load_surface(m.input);
  SurfaceGraph graph = surface_graph(data, m.knn);
  HierarchyConfig config = m.hierarchy;
  config.rng_seed = m.seed;
  const auto start = Clock::now();
  Hierarchy h = build_hierarchy(std::move(graph), config);
  const double seconds = seconds_since(start);
  write_levels(m, h, dir);
  if (m.export_levels) export_levels(h, data, dir);
  std::string sizes;
  for (const auto& s : h.stats) sizes += (sizes.empty() ? "" : ",") + std::to_string(s.vertices);
  out << format("levels=%td n=%s hier_s=%.3f", h.num_levels(), sizes.c_str(), shown_seconds(m, seconds)) << '\n';
  return kOk;
}

int cmd_solve(const RunManifest& m, std::ostream& out) {
  const fs::path dir = m.output_dir;
  Problem p = load_problem(m);
  HierarchyConfig config = m.hierarchy;
  config.rng_seed = m.seed;

  const auto start = Clock::now();
  Hierarchy h = build_hierarchy(p.graph, config);
  const double hier_seconds = seconds_since(start);
  write_levels(m, h, dir);
  if (m.export_levels) export_levels(h, p.data, dir);
  if (m.export_matrices) {
    write_matrix_market(p.system.matrix, dir / "system.mtx");
    for (std::size_t l = 0; l < h.prolongations.size(); ++l)
      write_matrix_market(h.prolongations[l], dir / ("prolongation_" + std::to_string(l + 1) + ".mtx"));
  }

  MultigridOperator op = setup(p.system.matrix, h, p.ops.mass);
  auto [x, report] = solve(op, p.system.rhs, {}, m.solver);
  write_vector(dir / "solution.txt", x);
  {
    auto csv = open_output(dir / "convergence.csv");
    write_convergence_csv(report, csv, !m.zero_timings);
  }
  const std::string line =
      summary_line(m, hier_seconds, report.setup_seconds, report.solve_seconds, report.iterations, report.converged);
  open_output(dir / "summary.txt") << line << '\n';
  out << line << '\n';
  return kOk;
}

std::string csv_field(std::string text) {
  for (char& c : text)
    if (c == '\n' || c == '\r') c = ' ';
  if (text.find_first_of(",\"") == std::string::npos) return text;
  std::string quoted = "\"";
  for (char c : text) quoted += c == '"' ? std::string("\"\"") : std::string(1, c);
  return quoted + "\"";
}

int cmd_ablate(const RunManifest& m, std::ostream& out) {
  const fs::path dir = m.output_dir;
  Problem p = load_problem(m);

  std::vector<std::pair<std::string, HierarchyConfig>> variants;
  HierarchyConfig base = m.hierarchy;
  base.rng_seed = m.seed;
  if (m.axis == "sampling") {
    for (auto v : {SamplingVariant::Gravo, SamplingVariant::Random, SamplingVariant::FarthestPoint,
                   SamplingVariant::MaximalIndependentSet}) {
      HierarchyConfig c = base;
      c.sampling = v;
      variants.emplace_back(std::string(to_string(v)), c);
    }
  } else if (m.axis == "selection") {
    for (auto v : {SelectionVariant::VoronoiTriangle, SelectionVariant::Closest2, SelectionVariant::Closest3,
                   SelectionVariant::Closest4, SelectionVariant::Random3, SelectionVariant::ClosestVertex,
                   SelectionVariant::AllTriangles}) {
      HierarchyConfig c = base;
      c.selection = v;
      variants.emplace_back(std::string(to_string(v)), c);
    }
  } else if (m.axis == "weighting") {
    for (auto v : {WeightingVariant::Barycentric, WeightingVariant::Uniform, WeightingVariant::InverseDistance}) {
      HierarchyConfig c = base;
      c.weighting = v;
      variants.emplace_back(std::string(to_string(v)), c);
    }
    HierarchyConfig c = base;
    c.shift_seeds = false;
    variants.emplace_back("no_shift", c);
  } else {
    throw std::invalid_argument("unknown ablation axis '" + m.axis + "'");
  }

  auto csv = open_output(dir / ("ablate_" + m.axis + ".csv"));
  csv << "variant,levels,hier_seconds,setup_seconds,iterations,solve_seconds,converged,final_residual,error\n";
  for (const auto& [name, config] : variants) {
    std::string row;
    try {
      const auto start = Clock::now();
      Hierarchy h = build_hierarchy(p.graph, config);
      const double hier_seconds = seconds_since(start);
      MultigridOperator op = setup(p.system.matrix, h, p.ops.mass);
      auto [x, report] = solve(op, p.system.rhs, {}, m.solver);
      row = format("%s,%td,%.9g,%.9g,%d,%.9g,%s,%.9g,", name.c_str(), h.num_levels(), shown_seconds(m, hier_seconds),
                   shown_seconds(m, report.setup_seconds), report.iterations, shown_seconds(m, report.solve_seconds),
                   report.converged ? "true" : "false", report.residual_history.back());
      out << name << ": " << summary_line(m, hier_seconds, report.setup_seconds, report.solve_seconds,
                                          report.iterations, report.converged)
          << '\n';
    } catch (const std::exception& e) {
      row = name + ",,,,,,false,," + csv_field(e.what());
      out << name << ": error: " << e.what() << '\n';
    }
    csv << row << '\n';
  }
  return kOk;
}

int cmd_oracle(const RunManifest& m, std::ostream& out) {
  const fs::path dir = m.output_dir;
  {
    SurfaceData data = load_surface(m.input);
    const auto n = static_cast<Index>(std::visit([](const auto& d) { return d.positions.size(); }, data));
    if (n > kOracleLimit)
      throw OracleSizeError("input has " + std::to_string(n) + " vertices; the dense oracle accepts at most " +
                            std::to_string(kOracleLimit));
  }
  Problem p = load_problem(m);
  const SparseMatrix& a = p.system.matrix;
  Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(a.rows(), a.cols());
  for (Index i = 0; i < a.rows(); ++i) {
    const auto cols = a.row_cols(i);
    const auto vals = a.row_values(i);
    for (std::size_t k = 0; k < cols.size(); ++k) dense(i, cols[k]) = vals[k];
  }
  Eigen::LLT<Eigen::MatrixXd> llt(dense);
  if (llt.info() != Eigen::Success) throw NotPositiveDefiniteError(0);
  const Eigen::VectorXd rhs = Eigen::Map<const Eigen::VectorXd>(p.system.rhs.data(), a.rows());
  const Eigen::VectorXd x = llt.solve(rhs);
  write_vector(dir / "oracle_solution.txt", std::span<const double>(x.data(), static_cast<std::size_t>(x.size())));
  const double rhs_norm = rhs.norm();
  out << format("oracle n=%td residual=%.3g", a.rows(),
                (dense * x - rhs).norm() / (rhs_norm > 0.0 ? rhs_norm : 1.0))
      << '\n';
  return kOk;
}

template <class Enum>
Enum parse_enum(const json& j, const char* key, Enum fallback, Enum (*parse)(std::string_view)) {
  if (!j.contains(key)) return fallback;
  try {
    return parse(j.at(key).get<std::string>());
  } catch (const std::invalid_argument& e) {
    throw ParseError(std::string("manifest: ") + e.what());
  }
}

template <class T>
void read_field(const json& j, const char* key, T& target) {
  if (j.contains(key)) target = j.at(key).get<T>();
}

}  // namespace

ordered_json to_json(const RunManifest& m) {
  ordered_json j;
  j["command"] = m.command;
  j["input"] = m.input;
  j["output_dir"] = m.output_dir;
  j["seed"] = m.seed;
  j["knn"] = m.knn;
  j["problem"] = {{"kind", to_string(m.problem.kind)},
                  {"eta", m.problem.eta},
                  {"alpha", m.problem.alpha},
                  {"beta", m.problem.beta},
                  {"input_function", m.input_function},
                  {"system_matrix", m.system_matrix}};
  const HierarchyConfig& h = m.hierarchy;
  j["hierarchy"] = {{"phi", h.phi},
                    {"coarsest_size", h.coarsest_size},
                    {"ring_limit", h.ring_limit},
                    {"shift_seeds", h.shift_seeds},
                    {"spread_vertex_projections", h.spread_vertex_projections},
                    {"sampling", to_string(h.sampling)},
                    {"selection", to_string(h.selection)},
                    {"weighting", to_string(h.weighting)}};
  const SolverConfig& s = m.solver;
  j["solver"] = {{"nu_pre", s.nu_pre},
                 {"nu_post", s.nu_post},
                 {"tol", s.epsilon},
                 {"max_iters", s.max_iterations},
                 {"norm", to_string(s.norm)}};
  j["axis"] = m.axis;
  j["export_levels"] = m.export_levels;
  j["export_matrices"] = m.export_matrices;
  j["zero_timings"] = m.zero_timings;
  return j;
}

RunManifest manifest_from_json(const json& j) {
  RunManifest m;
  try {
    read_field(j, "command", m.command);
    read_field(j, "input", m.input);
    read_field(j, "output_dir", m.output_dir);
    read_field(j, "seed", m.seed);
    read_field(j, "knn", m.knn);
    read_field(j, "axis", m.axis);
    read_field(j, "export_levels", m.export_levels);
    read_field(j, "export_matrices", m.export_matrices);
    read_field(j, "zero_timings", m.zero_timings);
    if (j.contains("problem")) {
      const json& p = j.at("problem");
      m.problem.kind = parse_enum(p, "kind", m.problem.kind, parse_problem_kind);
      read_field(p, "eta", m.problem.eta);
      read_field(p, "alpha", m.problem.alpha);
      read_field(p, "beta", m.problem.beta);
      read_field(p, "input_function", m.input_function);
      read_field(p, "system_matrix", m.system_matrix);
    }
    if (j.contains("hierarchy")) {
      const json& h = j.at("hierarchy");
      HierarchyConfig& c = m.hierarchy;
      read_field(h, "phi", c.phi);
      read_field(h, "coarsest_size", c.coarsest_size);
      read_field(h, "ring_limit", c.ring_limit);
      read_field(h, "shift_seeds", c.shift_seeds);
      read_field(h, "spread_vertex_projections", c.spread_vertex_projections);
      c.sampling = parse_enum(h, "sampling", c.sampling, parse_sampling_variant);
      c.selection = parse_enum(h, "selection", c.selection, parse_selection_variant);
      c.weighting = parse_enum(h, "weighting", c.weighting, parse_weighting_variant);
    }
    if (j.contains("solver")) {
      const json& s = j.at("solver");
      read_field(s, "nu_pre", m.solver.nu_pre);
      read_field(s, "nu_post", m.solver.nu_post);
      read_field(s, "tol", m.solver.epsilon);
      read_field(s, "max_iters", m.solver.max_iterations);
      m.solver.norm = parse_enum(s, "norm", m.solver.norm, parse_norm_kind);
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("manifest: ") + e.what());
  }
  return m;
}

RunManifest load_manifest(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  try {
    return manifest_from_json(json::parse(in));
  } catch (const json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void save_manifest(const RunManifest& manifest, const fs::path& path) {
  open_output(path) << to_json(manifest).dump(2) << '\n';
}

int execute(const RunManifest& m, std::ostream& out, std::ostream& err) {
  try {
    if (m.input.empty()) throw ParseError("no input file given");
    m.hierarchy.validate();
    m.solver.validate();
    fs::create_directories(m.output_dir);
    save_manifest(m, fs::path(m.output_dir) / "manifest.json");
    if (m.command == "hierarchy") return cmd_hierarchy(m, out);
    if (m.command == "solve") return cmd_solve(m, out);
    if (m.command == "ablate") return cmd_ablate(m, out);
    if (m.command == "oracle") return cmd_oracle(m, out);
    throw ParseError("unknown command '" + m.command + "'");
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kParseFailure;
  } catch (const ZeroDiagonalError& e) {
    err << "error: " << e.what() << '\n';
    return kZeroDiagonal;
  } catch (const OracleSizeError& e) {
    err << "error: " << e.what() << '\n';
    return kOracleSize;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kDegenerateInput;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kParseFailure;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kParseFailure;
  }
}

namespace {

struct Overrides {
  std::optional<std::string> input, out, manifest;
  std::optional<double> phi;
  std::optional<Index> coarsest;
  std::optional<int> ring_limit;
  bool no_shift = false;
  std::optional<std::string> sampling, selection, weighting;
  std::optional<int> nu_pre, nu_post, max_iters;
  std::optional<double> tol;
  std::optional<std::string> norm;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> problem;
  std::optional<double> eta, alpha, beta;
  std::optional<std::string> input_function, system_matrix;
  std::optional<int> knn;
  std::optional<std::string> axis;
  bool export_levels = false;
  bool export_matrices = false;
  bool zero_timings = false;
};

void add_common(CLI::App* sub, Overrides& o) {
  sub->add_option("input", o.input, "Input mesh (.obj, .ply) or point cloud (.ply)");
  sub->add_option("--out", o.out, "Output directory");
  sub->add_option("--manifest", o.manifest, "Run manifest (JSON); other flags override it");
  sub->add_option("--phi", o.phi, "Target fraction of points kept per level");
  sub->add_option("--coarsest", o.coarsest, "Stop coarsening at this many points");
  sub->add_option("--ring-limit", o.ring_limit, "Hop limit of the sampling search");
  sub->add_flag("--no-shift", o.no_shift, "Keep coarse points at their sample positions");
  sub->add_option("--sampling", o.sampling, "gravo | random | fps | mis");
  sub->add_option("--selection", o.selection,
                  "voronoi_triangle | closest2 | closest3 | closest4 | random3 | closest_vertex | all_triangles");
  sub->add_option("--weighting", o.weighting, "barycentric | uniform | inverse_distance");
  sub->add_option("--nu-pre", o.nu_pre, "Gauss-Seidel sweeps before the coarse correction");
  sub->add_option("--nu-post", o.nu_post, "Gauss-Seidel sweeps after the coarse correction");
  sub->add_option("--tol", o.tol, "Relative residual tolerance");
  sub->add_option("--max-iters", o.max_iters, "V-cycle limit");
  sub->add_option("--norm", o.norm, "mass | euclidean");
  sub->add_option("--seed", o.seed, "Seed for random right-hand sides and random variants");
  sub->add_option("--problem", o.problem, "poisson | smoothing | bilaplacian");
  sub->add_option("--eta", o.eta, "Mass shift of the Poisson problem");
  sub->add_option("--alpha", o.alpha, "Laplace smoothing weight");
  sub->add_option("--beta", o.beta, "Bi-Laplace smoothing weight");
  sub->add_option("--input-function", o.input_function, "Per-vertex input values, one per line");
  sub->add_option("--system-matrix", o.system_matrix, "Matrix Market system replacing the assembled one");
  sub->add_option("--k", o.knn, "Neighbours per point for point clouds");
  sub->add_flag("--export-levels", o.export_levels, "Write one OBJ per level");
  sub->add_flag("--export-matrices", o.export_matrices, "Write the system and prolongations as Matrix Market");
  sub->add_flag("--zero-timings", o.zero_timings, "Write all timings as 0 for reproducible output");
}

template <class T>
void apply(const std::optional<T>& value, T& target) {
  if (value) target = *value;
}

RunManifest resolve(const std::string& command, const Overrides& o) {
  RunManifest m;
  if (o.manifest) {
    m = load_manifest(*o.manifest);
  } else if (command == "ablate") {
    m.problem.kind = ProblemKind::Smoothing;
  }
  m.command = command;
  apply(o.input, m.input);
  apply(o.out, m.output_dir);
  apply(o.phi, m.hierarchy.phi);
  apply(o.coarsest, m.hierarchy.coarsest_size);
  apply(o.ring_limit, m.hierarchy.ring_limit);
  if (o.no_shift) m.hierarchy.shift_seeds = false;
  if (o.sampling) m.hierarchy.sampling = parse_sampling_variant(*o.sampling);
  if (o.selection) m.hierarchy.selection = parse_selection_variant(*o.selection);
  if (o.weighting) m.hierarchy.weighting = parse_weighting_variant(*o.weighting);
  apply(o.nu_pre, m.solver.nu_pre);
  apply(o.nu_post, m.solver.nu_post);
  apply(o.tol, m.solver.epsilon);
  apply(o.max_iters, m.solver.max_iterations);
  if (o.norm) m.solver.norm = parse_norm_kind(*o.norm);
  apply(o.seed, m.seed);
  if (o.problem) m.problem.kind = parse_problem_kind(*o.problem);
  apply(o.eta, m.problem.eta);
  apply(o.alpha, m.problem.alpha);
  apply(o.beta, m.problem.beta);
  apply(o.input_function, m.input_function);
  apply(o.system_matrix, m.system_matrix);
  apply(o.knn, m.knn);
  apply(o.axis, m.axis);
  if (o.export_levels) m.export_levels = true;
  if (o.export_matrices) m.export_matrices = true;
  if (o.zero_timings) m.zero_timings = true;
  return m;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Geometric multigrid solver for Laplace-type systems on surfaces"};
  app.name("gravomg");
  app.require_subcommand(1);
  Overrides o;
  add_common(app.add_subcommand("hierarchy", "Build the level hierarchy and write levels.csv"), o);
  add_common(app.add_subcommand("solve", "Solve a problem with V-cycles"), o);
  CLI::App* ablate = app.add_subcommand("ablate", "Compare hierarchy variants along one axis");
  add_common(ablate, o);
  ablate->add_option("--axis", o.axis, "sampling | selection | weighting")
      ->check(CLI::IsMember({"sampling", "selection", "weighting"}));
  add_common(app.add_subcommand("oracle", "Dense Cholesky reference solution"), o);

  std::vector<std::string> storage{"gravomg"};
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : storage) argv.push_back(s.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kParseFailure;
  }

  RunManifest manifest;
  try {
    manifest = resolve(app.get_subcommands().front()->get_name(), o);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kParseFailure;
  }
  return execute(manifest, out, err);
}

}  // namespace gravomg::cli
