import numpy as np
import pytest
import scipy.sparse.linalg as spla

import gravomg


def grid_mesh(n):
    xs, ys = np.meshgrid(np.linspace(0, 1, n), np.linspace(0, 1, n), indexing="ij")
    positions = np.stack([xs.ravel(), ys.ravel(), np.zeros(n * n)], axis=1)
    faces = []
    for i in range(n - 1):
        for j in range(n - 1):
            a, b, c, d = i * n + j, (i + 1) * n + j, (i + 1) * n + j + 1, i * n + j + 1
            faces += [(a, b, c), (a, c, d)]
    return positions, np.array(faces, dtype=np.int64)


def test_operators_are_symmetric_with_positive_mass():
    positions, faces = grid_mesh(10)
    stiffness, mass = gravomg.operators(positions, faces)
    assert stiffness.shape == (100, 100)
    assert abs(stiffness - stiffness.T).max() < 1e-12
    assert np.all(mass > 0)
    assert mass.sum() == pytest.approx(1.0)
    assert np.allclose(stiffness @ np.ones(100), 0.0, atol=1e-12)


def test_prolongation_rows_are_convex():
    positions, faces = grid_mesh(30)
    h = gravomg.build_hierarchy(positions, faces, coarsest_size=50)
    assert h.num_levels >= 2
    assert all(a > b for a, b in zip(h.level_sizes, h.level_sizes[1:]))
    for level in range(h.num_levels - 1):
        p = gravomg.prolongation(h, level)
        assert p.shape == (h.level_sizes[level], h.level_sizes[level + 1])
        assert np.allclose(p.sum(axis=1), 1.0, atol=1e-9)
        assert p.data.min() >= 0.0
        assert np.diff(p.indptr).max() <= 3


def test_poisson_solve_matches_direct_solver():
    positions, faces = grid_mesh(30)
    y = np.random.default_rng(3).standard_normal(len(positions))
    matrix, rhs, mass = gravomg.assemble(positions, faces, y, kind="poisson", eta=1e-2)
    h = gravomg.build_hierarchy(positions, faces, coarsest_size=50)
    x, report = gravomg.Solver(matrix, h, mass).solve(rhs, tol=1e-8)
    assert report["converged"]
    assert len(report["residual_history"]) == report["iterations"] + 1
    reference = spla.spsolve(matrix.tocsc(), rhs)
    err = x - reference
    assert np.sqrt(err @ (mass * err)) <= 1e-6 * np.sqrt(reference @ (mass * reference))


def test_point_cloud_smoothing_converges():
    rng = np.random.default_rng(0)
    points = rng.standard_normal((800, 3))
    points /= np.linalg.norm(points, axis=1, keepdims=True)
    x, report = gravomg.solve(points, kind="smoothing", alpha=1e-2, coarsest_size=60)
    assert report["converged"]
    assert x.shape == (800,)


def test_missing_file_raises_parse_error(tmp_path):
    with pytest.raises(gravomg.ParseError):
        gravomg.load_surface(str(tmp_path / "missing.obj"))


def test_load_surface_reads_obj(tmp_path):
    path = tmp_path / "tri.obj"
    path.write_text("v 0 0 0\nv 1 0 0\nv 0 1 0\nv 1 1 0\nf 1 2 4 3\n")
    positions, faces = gravomg.load_surface(str(path))
    assert positions.shape == (4, 3)
    assert faces.tolist() == [[0, 1, 3], [0, 3, 2]]
