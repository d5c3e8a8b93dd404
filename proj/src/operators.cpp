#include "gravomg/operators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "gravomg/errors.hpp"

namespace gravomg {

namespace {

void check_input(const OperatorPair& ops, std::span<const double> y) {
  const auto n = static_cast<std::size_t>(ops.stiffness.rows());
  if (ops.mass.size() != n || y.size() != n)
    throw DimensionError("system of size " + std::to_string(n) + " given mass of size " +
                         std::to_string(ops.mass.size()) + " and input of size " + std::to_string(y.size()));
}

std::vector<double> mass_times(std::span<const double> mass, std::span<const double> y) {
  std::vector<double> out(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) out[i] = mass[i] * y[i];
  return out;
}

void fix_isolated(std::vector<double>& mass, OperatorDiagnostics* diagnostics) {
  double smallest = std::numeric_limits<double>::infinity();
  for (double m : mass)
    if (m > 0.0) smallest = std::min(smallest, m);
  const double fill = std::isfinite(smallest) ? 1e-3 * smallest : 1.0;
  for (double& m : mass) {
    if (m > 0.0) continue;
    m = fill;
    if (diagnostics) ++diagnostics->isolated_vertices;
  }
}

double mean_face_edge_length(const TriangleMesh& mesh) {
  double total = 0.0;
  for (const Face& f : mesh.faces)
    for (int k = 0; k < 3; ++k) total += (mesh.positions[f[k]] - mesh.positions[f[(k + 1) % 3]]).norm();
  return mesh.faces.empty() ? 0.0 : total / (3.0 * static_cast<double>(mesh.faces.size()));
}

}  // namespace

SparseMatrix cotan_laplacian(const TriangleMesh& mesh, OperatorDiagnostics* diagnostics) {
  mesh.validate();
  const double mean_edge = mean_face_edge_length(mesh);
  const double degenerate_area = 1e-12 * mean_edge * mean_edge;

  std::vector<Triplet> triplets;
  triplets.reserve(mesh.faces.size() * 12);
  for (const Face& f : mesh.faces) {
    const Vec3& a = mesh.positions[f[0]];
    const Vec3& b = mesh.positions[f[1]];
    const Vec3& c = mesh.positions[f[2]];
    const double double_area = (b - a).cross(c - a).norm();
    if (diagnostics && 0.5 * double_area < degenerate_area) ++diagnostics->degenerate_faces;

    for (int k = 0; k < 3; ++k) {
      const Index corner = f[k];
      const Index i = f[(k + 1) % 3];
      const Index j = f[(k + 2) % 3];
      const Vec3 u = mesh.positions[i] - mesh.positions[corner];
      const Vec3 v = mesh.positions[j] - mesh.positions[corner];
      const double dot = u.dot(v);
      double cot;
      if (double_area > 0.0)
        cot = dot / double_area;
      else
        cot = dot > 0.0 ? kMaxCotangent : (dot < 0.0 ? -kMaxCotangent : 0.0);
      if (std::abs(cot) > kMaxCotangent) {
        cot = std::copysign(kMaxCotangent, cot);
        if (diagnostics) ++diagnostics->clamped_cotangents;
      }
      const double w = 0.5 * cot;
      triplets.push_back({i, j, -w});
      triplets.push_back({j, i, -w});
      triplets.push_back({i, i, w});
      triplets.push_back({j, j, w});
    }
  }
  return SparseMatrix::from_triplets(mesh.num_vertices(), mesh.num_vertices(), triplets);
}

std::vector<double> lumped_mass(const TriangleMesh& mesh, OperatorDiagnostics* diagnostics) {
  mesh.validate();
  std::vector<double> mass(static_cast<std::size_t>(mesh.num_vertices()), 0.0);
  for (const Face& f : mesh.faces) {
    const Vec3& a = mesh.positions[f[0]];
    const Vec3& b = mesh.positions[f[1]];
    const Vec3& c = mesh.positions[f[2]];
    const double third = (b - a).cross(c - a).norm() / 6.0;
    for (Index v : f) mass[v] += third;
  }
  fix_isolated(mass, diagnostics);
  return mass;
}

OperatorPair mesh_operators(const TriangleMesh& mesh, OperatorDiagnostics* diagnostics) {
  return {cotan_laplacian(mesh, diagnostics), lumped_mass(mesh, diagnostics)};
}

OperatorPair graph_laplacian(const SurfaceGraph& graph, OperatorDiagnostics* diagnostics) {
  if (graph.num_edges() == 0) throw DegenerateInputError("graph Laplacian needs at least one edge");
  const Index n = graph.num_vertices();
  std::vector<Triplet> triplets;
  triplets.reserve(static_cast<std::size_t>(graph.num_edges()) * 4);
  std::vector<double> mass(static_cast<std::size_t>(n), 0.0);
  for (auto [i, j] : graph.edges()) {
    const double length = graph.edge_length(i, j);
    double w;
    if (length > 1.0 / kMaxGraphWeight) {
      w = 1.0 / length;
    } else {
      w = kMaxGraphWeight;
      if (diagnostics) ++diagnostics->clamped_weights;
    }
    triplets.push_back({i, j, -w});
    triplets.push_back({j, i, -w});
    triplets.push_back({i, i, w});
    triplets.push_back({j, j, w});
    mass[i] += length * length / 6.0;
    mass[j] += length * length / 6.0;
  }
  fix_isolated(mass, diagnostics);
  return {SparseMatrix::from_triplets(n, n, triplets), std::move(mass)};
}

OperatorPair surface_operators(const SurfaceData& data, const SurfaceGraph& graph,
                               OperatorDiagnostics* diagnostics) {
  if (const auto* mesh = std::get_if<TriangleMesh>(&data)) return mesh_operators(*mesh, diagnostics);
  return graph_laplacian(graph, diagnostics);
}

LinearSystem assemble_poisson(const OperatorPair& ops, double eta, std::span<const double> y) {
  if (!(eta > 0.0)) throw std::invalid_argument("Poisson mass shift eta must be positive");
  check_input(ops, y);
  SparseMatrix shifted = add(ops.stiffness, SparseMatrix::diagonal(ops.mass), 1.0, eta);
  return {std::move(shifted), mass_times(ops.mass, y)};
}

LinearSystem assemble_smoothing(const OperatorPair& ops, double alpha, std::span<const double> y) {
  if (!(alpha >= 0.0)) throw std::invalid_argument("smoothing weight alpha must be >= 0");
  check_input(ops, y);
  SparseMatrix matrix = add(SparseMatrix::diagonal(ops.mass), ops.stiffness, 1.0, alpha);
  return {std::move(matrix), mass_times(ops.mass, y)};
}

LinearSystem assemble_bilaplacian(const OperatorPair& ops, double alpha, double beta, std::span<const double> y) {
  if (!(beta >= 0.0)) throw std::invalid_argument("bi-Laplace weight beta must be >= 0");
  LinearSystem system = assemble_smoothing(ops, alpha, y);
  if (beta == 0.0) return system;
  std::vector<double> inverse_mass(ops.mass.size());
  for (std::size_t i = 0; i < ops.mass.size(); ++i) {
    if (!(ops.mass[i] > 0.0))
      throw DegenerateInputError("bi-Laplacian needs positive mass, entry " + std::to_string(i) + " is not");
    inverse_mass[i] = 1.0 / ops.mass[i];
  }
  SparseMatrix bilaplace = multiply(ops.stiffness, scale_rows(ops.stiffness, inverse_mass));
  system.matrix = add(system.matrix, bilaplace, 1.0, beta);
  return system;
}

LinearSystem assemble(const OperatorPair& ops, const ProblemSpec& problem, std::span<const double> y) {
  switch (problem.kind) {
    case ProblemKind::Poisson: return assemble_poisson(ops, problem.eta, y);
    case ProblemKind::Smoothing: return assemble_smoothing(ops, problem.alpha, y);
    case ProblemKind::BiLaplacianSmoothing: return assemble_bilaplacian(ops, problem.alpha, problem.beta, y);
  }
  throw std::invalid_argument("unknown problem kind");
}

std::string_view to_string(ProblemKind kind) {
  switch (kind) {
    case ProblemKind::Poisson: return "poisson";
    case ProblemKind::Smoothing: return "smoothing";
    case ProblemKind::BiLaplacianSmoothing: return "bilaplacian";
  }
  return "unknown";
}

ProblemKind parse_problem_kind(std::string_view name) {
  if (name == "poisson") return ProblemKind::Poisson;
  if (name == "smoothing") return ProblemKind::Smoothing;
  if (name == "bilaplacian" || name == "bilaplacian_smoothing") return ProblemKind::BiLaplacianSmoothing;
  throw std::invalid_argument("unknown problem '" + std::string(name) + "'");
}

}  // namespace gravomg
