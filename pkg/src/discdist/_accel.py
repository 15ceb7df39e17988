"""Monomial evaluation kernels.

Every numeric path in the package (values, gradients, Hessians, third
derivatives of homogeneous polynomials at batches of points) reduces to one
hot loop: evaluating all monomials ``x**alpha`` of a fixed degree at many
points.  That loop is compiled with numba when available; a pure-numpy
version is used otherwise or when ``DISCDIST_BACKEND=numpy`` is set.
"""

from __future__ import annotations

import os

import numpy as np

_requested = os.environ.get("DISCDIST_BACKEND", "numba").strip().lower()

try:
    if _requested == "numpy":
        raise ImportError("numpy backend requested")
    from numba import njit

    HAVE_NUMBA = True
except ImportError:
    HAVE_NUMBA = False


def backend_name() -> str:
    return "numba" if HAVE_NUMBA else "numpy"


def monomial_values_numpy(exps: np.ndarray, X: np.ndarray) -> np.ndarray:
    """Return ``V[k, j] = prod_i X[k, i] ** exps[j, i]``."""
    m, n = X.shape
    N = exps.shape[0]
    if N == 0:
        return np.zeros((m, 0))
    top = int(exps.max()) if exps.size else 0
    # pw[k, i, p] = X[k, i] ** p, built by repeated products (no pow()).
    pw = np.empty((m, n, top + 1))
    pw[:, :, 0] = 1.0
    for p in range(1, top + 1):
        pw[:, :, p] = pw[:, :, p - 1] * X
    out = np.ones((m, N))
    for i in range(n):
        out *= pw[:, i, exps[:, i]]
    return out


if HAVE_NUMBA:

    @njit(cache=True)
    def _monomial_values_nb(exps, X):
        m, n = X.shape
        N = exps.shape[0]
        top = 0
        for j in range(N):
            for i in range(n):
                if exps[j, i] > top:
                    top = exps[j, i]
        out = np.empty((m, N))
        pw = np.empty((n, top + 1))
        for k in range(m):
            for i in range(n):
                pw[i, 0] = 1.0
                for p in range(1, top + 1):
                    pw[i, p] = pw[i, p - 1] * X[k, i]
            for j in range(N):
                v = 1.0
                for i in range(n):
                    v *= pw[i, exps[j, i]]
                out[k, j] = v
        return out

    def monomial_values(exps: np.ndarray, X: np.ndarray) -> np.ndarray:
        if exps.shape[0] == 0:
            return np.zeros((X.shape[0], 0))
        return _monomial_values_nb(exps, np.ascontiguousarray(X, dtype=np.float64))

else:
    monomial_values = monomial_values_numpy
