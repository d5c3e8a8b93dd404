"""Geometric multigrid solver for Laplace-type systems on surfaces."""

import numpy as np
import scipy.sparse as sp

from . import _core
from ._core import (
    DegenerateInputError,
    DimensionError,
    Hierarchy,
    NotPositiveDefiniteError,
    ParseError,
    ZeroDiagonalError,
    build_hierarchy,
    load_surface,
)

__all__ = [
    "DegenerateInputError",
    "DimensionError",
    "Hierarchy",
    "NotPositiveDefiniteError",
    "ParseError",
    "Solver",
    "ZeroDiagonalError",
    "assemble",
    "build_hierarchy",
    "load_surface",
    "operators",
    "prolongation",
    "solve",
]


def _csr(parts):
    data, indices, indptr, shape = parts
    return sp.csr_matrix((data, indices, indptr), shape=shape)


def operators(positions, faces=None, k=8):
    """Stiffness matrix (scipy CSR) and lumped mass diagonal."""
    stiffness, mass = _core.operators(positions, faces, k)
    return _csr(stiffness), mass


def assemble(positions, faces, y, kind="poisson", eta=1e-6, alpha=1e-3, beta=0.0, k=8):
    """System matrix, right-hand side and mass diagonal for one problem."""
    matrix, rhs, mass = _core.assemble(positions, faces, np.asarray(y, dtype=float), kind, eta, alpha, beta, k)
    return _csr(matrix), rhs, mass


def prolongation(hierarchy, level):
    """P_level as a scipy CSR matrix (0-based level)."""
    return _csr(hierarchy.prolongation_parts(level))


class Solver:
    """Multigrid operator for a fixed system matrix and hierarchy."""

    def __init__(self, matrix, hierarchy, mass=None):
        a = sp.csr_matrix(matrix, dtype=float)
        a.sum_duplicates()
        a.sort_indices()
        self._op = _core.MultigridOperator(
            a.data, a.indices.astype(np.int64), a.indptr.astype(np.int64), a.shape, hierarchy,
            None if mass is None else np.asarray(mass, dtype=float))

    @property
    def num_levels(self):
        return self._op.num_levels

    def solve(self, b, x0=None, tol=1e-4, max_iters=100, nu_pre=2, nu_post=2, norm="mass"):
        return self._op.solve(np.asarray(b, dtype=float), x0, tol, max_iters, nu_pre, nu_post, norm)


def solve(positions, faces=None, y=None, kind="poisson", eta=1e-6, alpha=1e-3, beta=0.0, seed=0, k=8,
          coarsest_size=1000, tol=1e-4, **hierarchy_options):
    """Build a hierarchy, assemble a problem and solve it. Returns (x, report)."""
    positions = np.asarray(positions, dtype=float)
    if y is None:
        y = np.random.default_rng(seed).standard_normal(len(positions))
    matrix, rhs, mass = assemble(positions, faces, y, kind, eta, alpha, beta, k)
    hierarchy = build_hierarchy(positions, faces, k=k, coarsest_size=coarsest_size, seed=seed, **hierarchy_options)
    return Solver(matrix, hierarchy, mass).solve(rhs, tol=tol)
