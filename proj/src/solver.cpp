#include "gravomg/solver.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <string>

#include "gravomg/errors.hpp"

namespace gravomg {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void check_diagonal(const SparseMatrix& a, std::size_t level) {
  for (Index i = 0; i < a.rows(); ++i)
    if (std::abs(a.coeff(i, i)) <= kDropTolerance) throw ZeroDiagonalError(static_cast<std::size_t>(i), level);
}

void relax(const SparseMatrix& a, std::vector<double>& x, std::span<const double> b, int sweeps,
           std::size_t level) {
  try {
    gauss_seidel(a, x, b, sweeps);
  } catch (const ZeroDiagonalError& e) {
    throw ZeroDiagonalError(e.index(), level + 1);
  }
}

void cycle(const MultigridOperator& op, std::vector<double>& x, std::span<const double> b, std::size_t level,
           const SolverConfig& config) {
  if (level + 1 == op.num_levels()) {
    x = op.coarse_factorization().solve(b);
    return;
  }
  const SparseMatrix& a = op.matrix(level);
  relax(a, x, b, config.nu_pre, level);

  std::vector<double> residual = spmv(a, x);
  for (std::size_t i = 0; i < residual.size(); ++i) residual[i] = b[i] - residual[i];
  std::vector<double> coarse_rhs = spmv(op.restriction(level), residual);
  std::vector<double> correction(coarse_rhs.size(), 0.0);
  cycle(op, correction, coarse_rhs, level + 1, config);

  std::vector<double> lifted = spmv(op.prolongation(level), correction);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] += lifted[i];
  relax(a, x, b, config.nu_post, level);
}

}  // namespace

std::string_view to_string(NormKind kind) {
  return kind == NormKind::Euclidean ? "euclidean" : "mass";
}

NormKind parse_norm_kind(std::string_view name) {
  if (name == "euclidean") return NormKind::Euclidean;
  if (name == "mass" || name == "mass_weighted") return NormKind::MassWeighted;
  throw std::invalid_argument("unknown norm '" + std::string(name) + "'");
}

void SolverConfig::validate() const {
  if (nu_pre < 1 || nu_post < 1) throw std::invalid_argument("relaxation counts must be at least 1");
  if (!(epsilon > 0.0)) throw std::invalid_argument("tolerance must be positive");
  if (max_iterations < 0) throw std::invalid_argument("iteration limit must be non-negative");
}

MultigridOperator::MultigridOperator(SparseMatrix a, std::vector<SparseMatrix> prolongations,
                                     std::vector<double> mass)
    : prolongations_(std::move(prolongations)), mass_(std::move(mass)) {
  const auto start = Clock::now();
  if (a.rows() != a.cols()) throw DimensionError("system matrix must be square");
  if (!mass_.empty() && static_cast<Index>(mass_.size()) != a.rows())
    throw DimensionError("mass diagonal has " + std::to_string(mass_.size()) + " entries for a system of size " +
                         std::to_string(a.rows()));
  matrices_.push_back(std::move(a));
  for (std::size_t l = 0; l < prolongations_.size(); ++l) {
    const SparseMatrix& p = prolongations_[l];
    if (p.rows() != matrices_.back().rows())
      throw DimensionError("prolongation " + std::to_string(l + 1) + " has " + std::to_string(p.rows()) +
                           " rows, level matrix has " + std::to_string(matrices_.back().rows()));
    check_diagonal(matrices_.back(), l + 1);
    restrictions_.push_back(transpose(p));
    matrices_.push_back(triple_product(p, matrices_.back()));
  }
  check_diagonal(matrices_.back(), matrices_.size());
  coarse_ = DenseCholesky(matrices_.back());
  setup_seconds_ = seconds_since(start);
}

MultigridOperator setup(const SparseMatrix& a, const Hierarchy& hierarchy, std::vector<double> mass) {
  if (hierarchy.levels.empty() || hierarchy.levels.front().num_vertices() != a.rows())
    throw DimensionError("hierarchy does not match the system size");
  return MultigridOperator(a, hierarchy.prolongations, std::move(mass));
}

double vector_norm(const MultigridOperator& op, std::span<const double> v, NormKind kind) {
  double sum = 0.0;
  if (kind == NormKind::Euclidean) {
    for (double x : v) sum += x * x;
    return std::sqrt(sum);
  }
  const auto mass = op.mass();
  if (mass.empty()) throw std::invalid_argument("mass-weighted norm requested but no mass diagonal was given");
  if (mass.size() != v.size()) throw DimensionError("vector and mass diagonal differ in length");
  for (std::size_t i = 0; i < v.size(); ++i) sum += v[i] * v[i] / mass[i];
  return std::sqrt(sum);
}

double residual_norm(const MultigridOperator& op, std::span<const double> x, std::span<const double> b,
                     NormKind kind) {
  std::vector<double> r = spmv(op.matrix(0), x);
  if (r.size() != b.size()) throw DimensionError("right-hand side does not match the system size");
  for (std::size_t i = 0; i < r.size(); ++i) r[i] -= b[i];
  return vector_norm(op, r, kind);
}

std::vector<double> v_cycle(const MultigridOperator& op, std::span<const double> x, std::span<const double> b,
                            std::size_t level, const SolverConfig& config) {
  if (level >= op.num_levels()) throw std::out_of_range("level outside the hierarchy");
  const auto n = static_cast<std::size_t>(op.matrix(level).rows());
  if (x.size() != n || b.size() != n) throw DimensionError("v_cycle vectors do not match the level size");
  std::vector<double> out(x.begin(), x.end());
  cycle(op, out, b, level, config);
  return out;
}

std::pair<std::vector<double>, SolveReport> solve(const MultigridOperator& op, std::span<const double> b,
                                                  std::span<const double> x0, const SolverConfig& config) {
  config.validate();
  const auto n = static_cast<std::size_t>(op.matrix(0).rows());
  if (b.size() != n) throw DimensionError("right-hand side does not match the system size");
  if (!x0.empty() && x0.size() != n) throw DimensionError("initial guess does not match the system size");

  const auto start = Clock::now();
  SolveReport report;
  report.setup_seconds = op.setup_seconds();
  for (std::size_t l = 0; l < op.num_levels(); ++l) report.level_matrix_nnz.push_back(op.matrix(l).nnz());

  std::vector<double> x = x0.empty() ? std::vector<double>(n, 0.0) : std::vector<double>(x0.begin(), x0.end());
  double b_norm = vector_norm(op, b, config.norm);
  if (b_norm == 0.0) b_norm = 1.0;

  double relative = residual_norm(op, x, b, config.norm) / b_norm;
  report.residual_history.push_back(relative);
  report.cumulative_seconds.push_back(seconds_since(start));
  while (relative > config.epsilon && report.iterations < config.max_iterations && std::isfinite(relative)) {
    cycle(op, x, b, 0, config);
    ++report.iterations;
    relative = residual_norm(op, x, b, config.norm) / b_norm;
    report.residual_history.push_back(relative);
    report.cumulative_seconds.push_back(seconds_since(start));
  }
  report.converged = relative <= config.epsilon;
  report.solve_seconds = seconds_since(start);
  return {std::move(x), std::move(report)};
}

void write_convergence_csv(const SolveReport& report, std::ostream& out, bool timings) {
  out << "iteration,relative_residual,seconds\n";
  char buffer[96];
  for (std::size_t i = 0; i < report.residual_history.size(); ++i) {
    const double seconds = timings ? std::round(report.cumulative_seconds[i] * 1000.0) / 1000.0 : 0.0;
    std::snprintf(buffer, sizeof buffer, "%zu,%.9g,%.9g\n", i, report.residual_history[i], seconds);
    out << buffer;
  }
}

}  // namespace gravomg
