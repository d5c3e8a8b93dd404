#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "gravomg/mesh_io.hpp"
#include "gravomg/sparse.hpp"

namespace gravomg {

/// Counters for inputs the assembly had to patch up.
struct OperatorDiagnostics {
  std::size_t degenerate_faces = 0;    // area below 1e-12 * (mean edge length)^2
  std::size_t clamped_cotangents = 0;  // |cot| capped at kMaxCotangent
  std::size_t isolated_vertices = 0;   // mass entry replaced by a small positive value
  std::size_t clamped_weights = 0;     // graph edges with (nearly) coincident endpoints
};

inline constexpr double kMaxCotangent = 1e6;
inline constexpr double kMaxGraphWeight = 1e12;

/// Stiffness S (symmetric positive semidefinite, rows sum to zero) and the
/// diagonal of the lumped mass matrix M.
struct OperatorPair {
  SparseMatrix stiffness;
  std::vector<double> mass;
};

/// Cotangent Laplacian in the positive semidefinite convention:
/// S_ij = -(cot a_ij + cot b_ij) / 2 for i != j and S_ii = -sum_j S_ij.
SparseMatrix cotan_laplacian(const TriangleMesh& mesh, OperatorDiagnostics* diagnostics = nullptr);

/// One third of the incident triangle area per vertex. Vertices without
/// faces get 1e-3 times the smallest positive entry.
std::vector<double> lumped_mass(const TriangleMesh& mesh, OperatorDiagnostics* diagnostics = nullptr);

OperatorPair mesh_operators(const TriangleMesh& mesh, OperatorDiagnostics* diagnostics = nullptr);

/// Inverse-distance graph Laplacian, used for point clouds:
/// S_ij = -1 / |p_i - p_j| on edges, S_ii = -sum_j S_ij, and
/// m_i = (1/6) * sum over incident edges of |p_i - p_j|^2.
OperatorPair graph_laplacian(const SurfaceGraph& graph, OperatorDiagnostics* diagnostics = nullptr);

/// Cotangent operators for meshes; the graph Laplacian of `graph` otherwise.
OperatorPair surface_operators(const SurfaceData& data, const SurfaceGraph& graph,
                               OperatorDiagnostics* diagnostics = nullptr);

enum class ProblemKind { Poisson, Smoothing, BiLaplacianSmoothing };

inline constexpr double kDefaultEta = 1e-6;
inline constexpr double kDefaultAlpha = 1e-3;

struct ProblemSpec {
  ProblemKind kind = ProblemKind::Poisson;
  double alpha = kDefaultAlpha;  // Laplace smoothing weight
  double beta = 0.0;             // bi-Laplace smoothing weight
  double eta = kDefaultEta;      // mass shift for the Poisson problem
};

struct LinearSystem {
  SparseMatrix matrix;
  std::vector<double> rhs;
};

/// (S + eta M) x = M y
LinearSystem assemble_poisson(const OperatorPair& ops, double eta, std::span<const double> y);
/// (M + alpha S) x = M y
LinearSystem assemble_smoothing(const OperatorPair& ops, double alpha, std::span<const double> y);
/// Normal equations of (x-y)^T M (x-y) + alpha x^T S x + beta x^T S M^-1 S x:
/// (M + alpha S + beta S M^-1 S) x = M y
LinearSystem assemble_bilaplacian(const OperatorPair& ops, double alpha, double beta, std::span<const double> y);
LinearSystem assemble(const OperatorPair& ops, const ProblemSpec& problem, std::span<const double> y);

std::string_view to_string(ProblemKind kind);
/// Accepts "poisson", "smoothing", "bilaplacian" (and "bilaplacian_smoothing").
ProblemKind parse_problem_kind(std::string_view name);

}  // namespace gravomg
