#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "gravomg/errors.hpp"
#include "gravomg/hierarchy.hpp"
#include "gravomg/mesh_io.hpp"
#include "gravomg/operators.hpp"
#include "gravomg/solver.hpp"

namespace py = pybind11;
using namespace gravomg;

namespace {

using DoubleArray = py::array_t<double, py::array::c_style | py::array::forcecast>;
using IndexArray = py::array_t<Index, py::array::c_style | py::array::forcecast>;

std::vector<Vec3> to_points(const DoubleArray& points) {
  if (points.ndim() != 2 || points.shape(1) != 3) throw std::invalid_argument("positions must have shape (n, 3)");
  auto p = points.unchecked<2>();
  std::vector<Vec3> out(static_cast<std::size_t>(p.shape(0)));
  for (py::ssize_t i = 0; i < p.shape(0); ++i) out[i] = Vec3(p(i, 0), p(i, 1), p(i, 2));
  return out;
}

SurfaceData to_surface(const DoubleArray& positions, const std::optional<IndexArray>& faces) {
  std::vector<Vec3> points = to_points(positions);
  if (!faces) return PointCloud{std::move(points)};
  if (faces->ndim() != 2 || faces->shape(1) != 3) throw std::invalid_argument("faces must have shape (m, 3)");
  auto f = faces->unchecked<2>();
  TriangleMesh mesh{std::move(points), {}};
  for (py::ssize_t i = 0; i < f.shape(0); ++i) mesh.faces.push_back({f(i, 0), f(i, 1), f(i, 2)});
  mesh.validate();
  return mesh;
}

DoubleArray from_points(const std::vector<Vec3>& points) {
  DoubleArray out({static_cast<py::ssize_t>(points.size()), py::ssize_t{3}});
  auto o = out.mutable_unchecked<2>();
  for (std::size_t i = 0; i < points.size(); ++i)
    for (int k = 0; k < 3; ++k) o(i, k) = points[i][k];
  return out;
}

template <class T>
py::array_t<T> from_vector(std::span<const T> values) {
  py::array_t<T> out(static_cast<py::ssize_t>(values.size()));
  std::copy(values.begin(), values.end(), out.mutable_data());
  return out;
}

// (data, indices, indptr, shape), the scipy.sparse.csr_matrix argument order.
py::tuple csr_parts(const SparseMatrix& m) {
  return py::make_tuple(from_vector<double>(m.values()), from_vector<Index>(m.col_indices()),
                        from_vector<Index>(m.row_offsets()), py::make_tuple(m.rows(), m.cols()));
}

SparseMatrix from_csr_parts(const DoubleArray& data, const IndexArray& indices, const IndexArray& indptr,
                            std::pair<Index, Index> shape) {
  return SparseMatrix(shape.first, shape.second,
                      std::vector<Index>(indptr.data(), indptr.data() + indptr.size()),
                      std::vector<Index>(indices.data(), indices.data() + indices.size()),
                      std::vector<double>(data.data(), data.data() + data.size()));
}

HierarchyConfig make_config(double phi, Index coarsest_size, int ring_limit, bool shift_seeds,
                            const std::string& sampling, const std::string& selection,
                            const std::string& weighting, std::uint64_t seed) {
  HierarchyConfig c;
  c.phi = phi;
  c.coarsest_size = coarsest_size;
  c.ring_limit = ring_limit;
  c.shift_seeds = shift_seeds;
  c.sampling = parse_sampling_variant(sampling);
  c.selection = parse_selection_variant(selection);
  c.weighting = parse_weighting_variant(weighting);
  c.rng_seed = seed;
  return c;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Geometric multigrid on triangle meshes and point clouds";

  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<DegenerateInputError>(m, "DegenerateInputError", PyExc_ValueError);
  py::register_exception<DimensionError>(m, "DimensionError", PyExc_ValueError);
  py::register_exception<ZeroDiagonalError>(m, "ZeroDiagonalError", PyExc_ArithmeticError);
  py::register_exception<NotPositiveDefiniteError>(m, "NotPositiveDefiniteError", PyExc_ArithmeticError);

  m.def(
      "load_surface",
      [](const std::string& path) -> py::tuple {
        SurfaceData data = load_surface(path);
        if (const auto* mesh = std::get_if<TriangleMesh>(&data)) {
          IndexArray faces({static_cast<py::ssize_t>(mesh->faces.size()), py::ssize_t{3}});
          auto f = faces.mutable_unchecked<2>();
          for (std::size_t i = 0; i < mesh->faces.size(); ++i)
            for (int k = 0; k < 3; ++k) f(i, k) = mesh->faces[i][k];
          return py::make_tuple(from_points(mesh->positions), faces);
        }
        return py::make_tuple(from_points(std::get<PointCloud>(data).positions), py::none());
      },
      py::arg("path"), "Read an OBJ or PLY file. Returns (positions, faces); faces is None for point clouds.");

  m.def(
      "operators",
      [](const DoubleArray& positions, const std::optional<IndexArray>& faces, int k) {
        SurfaceData data = to_surface(positions, faces);
        OperatorPair ops = surface_operators(data, surface_graph(data, k));
        return py::make_tuple(csr_parts(ops.stiffness), from_vector<double>(ops.mass));
      },
      py::arg("positions"), py::arg("faces") = py::none(), py::arg("k") = kDefaultKnn,
      "Stiffness matrix (CSR parts) and lumped mass diagonal.");

  py::class_<Hierarchy>(m, "Hierarchy")
      .def_property_readonly("num_levels", &Hierarchy::num_levels)
      .def_property_readonly("level_sizes",
                             [](const Hierarchy& h) {
                               std::vector<Index> sizes;
                               for (const auto& s : h.stats) sizes.push_back(s.vertices);
                               return sizes;
                             })
      .def_property_readonly("fallback_fraction", [](const Hierarchy& h) { return h.fallback_fraction; })
      .def("positions", [](const Hierarchy& h, std::size_t level) { return from_points(h.levels.at(level).positions()); },
           py::arg("level"))
      .def("prolongation_parts",
           [](const Hierarchy& h, std::size_t level) { return csr_parts(h.prolongations.at(level)); },
           py::arg("level"));

  m.def(
      "build_hierarchy",
      [](const DoubleArray& positions, const std::optional<IndexArray>& faces, int k, double phi,
         Index coarsest_size, int ring_limit, bool shift_seeds, const std::string& sampling,
         const std::string& selection, const std::string& weighting, std::uint64_t seed) {
        SurfaceData data = to_surface(positions, faces);
        return build_hierarchy(surface_graph(data, k),
                               make_config(phi, coarsest_size, ring_limit, shift_seeds, sampling, selection,
                                           weighting, seed));
      },
      py::arg("positions"), py::arg("faces") = py::none(), py::arg("k") = kDefaultKnn, py::arg("phi") = 0.125,
      py::arg("coarsest_size") = 1000, py::arg("ring_limit") = 2, py::arg("shift_seeds") = true,
      py::arg("sampling") = "gravo", py::arg("selection") = "voronoi_triangle",
      py::arg("weighting") = "barycentric", py::arg("seed") = 0);

  py::class_<MultigridOperator>(m, "MultigridOperator")
      .def(py::init([](const DoubleArray& data, const IndexArray& indices, const IndexArray& indptr,
                       std::pair<Index, Index> shape, const Hierarchy& hierarchy, std::optional<DoubleArray> mass) {
             std::vector<double> m;
             if (mass) m.assign(mass->data(), mass->data() + mass->size());
             return setup(from_csr_parts(data, indices, indptr, shape), hierarchy, std::move(m));
           }),
           py::arg("data"), py::arg("indices"), py::arg("indptr"), py::arg("shape"), py::arg("hierarchy"),
           py::arg("mass") = py::none())
      .def_property_readonly("num_levels", &MultigridOperator::num_levels)
      .def_property_readonly("setup_seconds", &MultigridOperator::setup_seconds)
      .def(
          "solve",
          [](const MultigridOperator& op, const DoubleArray& b, std::optional<DoubleArray> x0, double tol,
             int max_iters, int nu_pre, int nu_post, const std::string& norm) {
            SolverConfig config;
            config.epsilon = tol;
            config.max_iterations = max_iters;
            config.nu_pre = nu_pre;
            config.nu_post = nu_post;
            config.norm = parse_norm_kind(norm);
            std::span<const double> start;
            if (x0) start = std::span<const double>(x0->data(), static_cast<std::size_t>(x0->size()));
            std::pair<std::vector<double>, SolveReport> result;
            {
              py::gil_scoped_release release;
              result = solve(op, std::span<const double>(b.data(), static_cast<std::size_t>(b.size())), start,
                             config);
            }
            const SolveReport& r = result.second;
            py::dict report;
            report["iterations"] = r.iterations;
            report["converged"] = r.converged;
            report["residual_history"] = r.residual_history;
            report["setup_seconds"] = r.setup_seconds;
            report["solve_seconds"] = r.solve_seconds;
            return py::make_tuple(from_vector<double>(result.first), report);
          },
          py::arg("b"), py::arg("x0") = py::none(), py::arg("tol") = 1e-4, py::arg("max_iters") = 100,
          py::arg("nu_pre") = 2, py::arg("nu_post") = 2, py::arg("norm") = "mass");

  m.def(
      "assemble",
      [](const DoubleArray& positions, const std::optional<IndexArray>& faces, const DoubleArray& y,
         const std::string& kind, double eta, double alpha, double beta, int k) {
        SurfaceData data = to_surface(positions, faces);
        OperatorPair ops = surface_operators(data, surface_graph(data, k));
        ProblemSpec spec{parse_problem_kind(kind), alpha, beta, eta};
        LinearSystem sys =
            assemble(ops, spec, std::span<const double>(y.data(), static_cast<std::size_t>(y.size())));
        return py::make_tuple(csr_parts(sys.matrix), from_vector<double>(sys.rhs), from_vector<double>(ops.mass));
      },
      py::arg("positions"), py::arg("faces"), py::arg("y"), py::arg("kind") = "poisson", py::arg("eta") = kDefaultEta,
      py::arg("alpha") = kDefaultAlpha, py::arg("beta") = 0.0, py::arg("k") = kDefaultKnn,
      "System matrix (CSR parts), right-hand side and mass diagonal of a problem.");
}
