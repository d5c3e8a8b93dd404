#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "gravomg/hierarchy.hpp"
#include "gravomg/sparse.hpp"

namespace gravomg {

enum class NormKind { Euclidean, MassWeighted };

std::string_view to_string(NormKind kind);
/// "euclidean", or "mass" / "mass_weighted".
NormKind parse_norm_kind(std::string_view name);

struct SolverConfig {
  int nu_pre = 2;
  int nu_post = 2;
  double epsilon = 1e-4;  // stop when ||Ax - b|| <= epsilon ||b||
  int max_iterations = 100;
  NormKind norm = NormKind::MassWeighted;

  void validate() const;
};

struct SolveReport {
  int iterations = 0;
  std::vector<double> residual_history;    // relative residuals, initial one included
  std::vector<double> cumulative_seconds;  // matches residual_history
  bool converged = false;
  std::vector<Index> level_matrix_nnz;
  double setup_seconds = 0.0;
  double solve_seconds = 0.0;
};

/// Galerkin level matrices A_1 = A, A_{l+1} = P_l^T A_l P_l, the
/// restrictions P_l^T, and a dense Cholesky factor of the coarsest matrix.
/// Immutable after construction; concurrent solves are safe.
class MultigridOperator {
public:
  /// Throws ZeroDiagonalError (with its 1-based level) when any level matrix
  /// has a zero diagonal entry, NotPositiveDefiniteError when the coarsest
  /// matrix cannot be factored, DimensionError when sizes do not chain.
  MultigridOperator(SparseMatrix a, std::vector<SparseMatrix> prolongations, std::vector<double> mass = {});

  std::size_t num_levels() const { return matrices_.size(); }
  /// 0-based level index.
  const SparseMatrix& matrix(std::size_t level) const { return matrices_[level]; }
  const SparseMatrix& prolongation(std::size_t level) const { return prolongations_[level]; }
  const SparseMatrix& restriction(std::size_t level) const { return restrictions_[level]; }
  const DenseCholesky& coarse_factorization() const { return coarse_; }
  std::span<const double> mass() const { return mass_; }
  double setup_seconds() const { return setup_seconds_; }

private:
  std::vector<SparseMatrix> matrices_;
  std::vector<SparseMatrix> prolongations_;
  std::vector<SparseMatrix> restrictions_;
  DenseCholesky coarse_;
  std::vector<double> mass_;
  double setup_seconds_ = 0.0;
};

MultigridOperator setup(const SparseMatrix& a, const Hierarchy& hierarchy, std::vector<double> mass = {});

/// ||b||_2, or sqrt(b^T M^-1 b) for the mass-weighted norm.
double vector_norm(const MultigridOperator& op, std::span<const double> v, NormKind kind);
double residual_norm(const MultigridOperator& op, std::span<const double> x, std::span<const double> b,
                     NormKind kind);

/// One V-cycle starting at the 0-based `level`: pre-relaxation, recursive
/// correction from the restricted residual, correction of the pre-relaxed
/// iterate, post-relaxation. The coarsest level is solved directly.
std::vector<double> v_cycle(const MultigridOperator& op, std::span<const double> x, std::span<const double> b,
                            std::size_t level, const SolverConfig& config);

/// V-cycles from the finest level until the relative residual drops to
/// config.epsilon or config.max_iterations is reached. An empty x0 starts
/// from zero. Non-convergence is reported, not thrown.
std::pair<std::vector<double>, SolveReport> solve(const MultigridOperator& op, std::span<const double> b,
                                                  std::span<const double> x0, const SolverConfig& config);

/// CSV `iteration,relative_residual,seconds`. With `timings` false the
/// seconds column is written as 0 so output is reproducible byte for byte.
void write_convergence_csv(const SolveReport& report, std::ostream& out, bool timings = true);

}  // namespace gravomg
