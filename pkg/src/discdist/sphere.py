"""Batched second-order methods on the unit sphere.

Objectives are given as Euclidean quantities of a function defined on
``R^n``: value, gradient and Hessian at each row of ``X``.  The Riemannian
gradient is the tangential projection of the Euclidean one and the
Riemannian Hessian on the tangent space is ``Pi H Pi - <x, grad> Pi``.
Steps are taken in the tangent space and retracted by renormalization.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

Objective = Callable[[np.ndarray], tuple[np.ndarray, np.ndarray, np.ndarray]]


def normalize_rows(X: np.ndarray) -> np.ndarray:
    return X / np.linalg.norm(X, axis=1, keepdims=True)


def tangent_bases(X: np.ndarray) -> np.ndarray:
    """Orthonormal tangent bases, shape ``(m, n, n-1)``, via Householder reflections."""
    m, n = X.shape
    s = np.where(X[:, -1] >= 0, 1.0, -1.0)
    V = s[:, None] * X
    V[:, -1] += 1.0
    H = np.eye(n)[None] - 2.0 * np.einsum("mi,mj->mij", V, V) / np.einsum("mi,mi->m", V, V)[:, None, None]
    return H[:, :, : n - 1]


def riemannian_parts(X, egrad, ehess):
    """Reduced Riemannian gradient ``(m, n-1)`` and Hessian ``(m, n-1, n-1)``."""
    U = tangent_bases(X)
    radial = np.einsum("mi,mi->m", X, egrad)
    g = np.einsum("mik,mi->mk", U, egrad)
    Hr = np.einsum("mik,mij,mjl->mkl", U, ehess, U)
    Hr -= radial[:, None, None] * np.eye(X.shape[1] - 1)[None]
    Hr = 0.5 * (Hr + np.transpose(Hr, (0, 2, 1)))
    return U, g, Hr


def canonical_sign(X: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    """Pick the lexicographically largest of ``x`` and ``-x`` for each row.

    Coordinates with magnitude below ``tol`` are treated as zero so that
    round-off does not flip the representative.
    """
    X = np.array(X, dtype=np.float64, copy=True)
    for k in range(X.shape[0]):
        for v in X[k]:
            if abs(v) > tol:
                if v < 0:
                    X[k] = -X[k]
                break
    return X


@dataclass
class SphereRunResult:
    X: np.ndarray
    value: np.ndarray
    grad_norm: np.ndarray
    min_curvature: np.ndarray
    converged: np.ndarray
    iterations: np.ndarray


def _line_search(fun_value, X, U, step, accept):
    """Backtrack each row independently; returns new points and acceptance mask."""
    m = X.shape[0]
    t = np.ones(m)
    Xn = X.copy()
    done = np.zeros(m, dtype=bool)
    for _ in range(40):
        todo = ~done
        if not todo.any():
            break
        trial = X[todo] + np.einsum("mik,mk->mi", U[todo], t[todo, None] * step[todo])
        trial = normalize_rows(trial)
        vals = fun_value(trial)
        ok = accept(np.flatnonzero(todo), t[todo], vals)
        idx = np.flatnonzero(todo)
        Xn[idx[ok]] = trial[ok]
        done[idx[ok]] = True
        t[idx[~ok]] *= 0.5
    return Xn, done


def minimize(
    objective: Objective,
    value_only: Callable[[np.ndarray], np.ndarray],
    X0: np.ndarray,
    *,
    grad_tol: float,
    curvature_floor: float,
    max_iters: int = 100,
    warmup_steps: int = 5,
    max_step: float = 0.5,
) -> SphereRunResult:
    """Saddle-free Riemannian Newton with Armijo backtracking, preceded by a
    few projected-gradient steps.  All rows are advanced together."""
    X = normalize_rows(np.asarray(X0, dtype=np.float64))
    m = X.shape[0]
    active = np.ones(m, dtype=bool)
    iters = np.zeros(m, dtype=np.int64)
    f, eg, eh = objective(X)
    U, g, Hr = riemannian_parts(X, eg, eh)
    eps = np.finfo(float).eps

    for it in range(max_iters + warmup_steps):
        gn = np.linalg.norm(g, axis=1)
        active &= gn > grad_tol
        if not active.any():
            break
        idx = np.flatnonzero(active)
        lam, Q = np.linalg.eigh(Hr[idx])
        if it < warmup_steps:
            # gradient step scaled by the largest curvature
            scale = np.maximum(np.abs(lam).max(axis=1), curvature_floor)
            step = -g[idx] / scale[:, None]
        else:
            lam_abs = np.maximum(np.abs(lam), curvature_floor)
            coeff = np.einsum("mkj,mk->mj", Q, g[idx]) / lam_abs
            step = -np.einsum("mkj,mj->mk", Q, coeff)
        norms = np.linalg.norm(step, axis=1)
        shrink = np.minimum(1.0, max_step / np.maximum(norms, 1e-300))
        step *= shrink[:, None]
        slope = np.einsum("mk,mk->m", g[idx], step)
        f0 = f[idx]

        def accept(rows, t, vals, f0=f0, slope=slope):
            thresh = f0[rows] + 1e-4 * t * slope[rows]
            flat = np.abs(vals - f0[rows]) <= 8 * eps * np.maximum(np.abs(f0[rows]), 1.0)
            return (vals <= thresh) | (flat & (t < 1e-6))

        Xn, moved = _line_search(value_only, X[idx], U[idx], step, accept)
        X[idx] = Xn
        iters[idx] += 1
        # rows that cannot move any further are stuck at round-off level
        active[idx[~moved]] = False
        fi, egi, ehi = objective(X[idx])
        Ui, gi, Hri = riemannian_parts(X[idx], egi, ehi)
        f[idx], U[idx], g[idx], Hr[idx] = fi, Ui, gi, Hri

    gn = np.linalg.norm(g, axis=1)
    min_curv = np.linalg.eigvalsh(Hr)[:, 0] if X.shape[1] > 1 else np.zeros(m)
    return SphereRunResult(X, f, gn, min_curv, gn <= grad_tol, iters)


def find_roots(
    objective: Objective,
    X0: np.ndarray,
    *,
    grad_tol: float,
    curvature_floor: float,
    max_iters: int = 100,
    max_step: float = 0.5,
) -> SphereRunResult:
    """Newton iteration on the Riemannian gradient (critical points of any
    index), globalized by backtracking on the squared gradient norm."""
    X = normalize_rows(np.asarray(X0, dtype=np.float64))
    m = X.shape[0]
    active = np.ones(m, dtype=bool)
    iters = np.zeros(m, dtype=np.int64)

    def merit(Y):
        _, eg, eh = objective(Y)
        _, gy, _ = riemannian_parts(Y, eg, eh)
        return np.einsum("mk,mk->m", gy, gy)

    f, eg, eh = objective(X)
    U, g, Hr = riemannian_parts(X, eg, eh)
    for _ in range(max_iters):
        gn = np.linalg.norm(g, axis=1)
        active &= gn > grad_tol
        if not active.any():
            break
        idx = np.flatnonzero(active)
        lam, Q = np.linalg.eigh(Hr[idx])
        lam_safe = np.where(lam >= 0, 1.0, -1.0) * np.maximum(np.abs(lam), curvature_floor)
        coeff = np.einsum("mkj,mk->mj", Q, g[idx]) / lam_safe
        step = -np.einsum("mkj,mj->mk", Q, coeff)
        norms = np.linalg.norm(step, axis=1)
        step *= np.minimum(1.0, max_step / np.maximum(norms, 1e-300))[:, None]
        phi0 = gn[idx] ** 2

        def accept(rows, t, vals, phi0=phi0):
            return vals <= (1.0 - 1e-4 * t) * phi0[rows]

        Xn, moved = _line_search(merit, X[idx], U[idx], step, accept)
        X[idx] = Xn
        iters[idx] += 1
        active[idx[~moved]] = False
        fi, egi, ehi = objective(X[idx])
        Ui, gi, Hri = riemannian_parts(X[idx], egi, ehi)
        f[idx], U[idx], g[idx], Hr[idx] = fi, Ui, gi, Hri

    gn = np.linalg.norm(g, axis=1)
    min_curv = np.abs(np.linalg.eigvalsh(Hr)).min(axis=1)
    return SphereRunResult(X, f, gn, min_curv, gn <= grad_tol, iters)


def cluster(X: np.ndarray, angle: float) -> list[list[int]]:
    """Greedy clustering of (sign-canonical) unit vectors up to antipodes.

    Rows are assumed pre-sorted in the desired priority order; each cluster
    is represented by its first member.
    """
    reps: list[int] = []
    groups: list[list[int]] = []
    for k in range(X.shape[0]):
        for gi, r in enumerate(reps):
            dist = min(np.linalg.norm(X[k] - X[r]), np.linalg.norm(X[k] + X[r]))
            if dist <= angle:
                groups[gi].append(k)
                break
        else:
            reps.append(k)
            groups.append([k])
    return groups
