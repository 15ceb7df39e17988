"""Distance from a homogeneous polynomial to the real discriminant.

Under the Bombieri norm the distance from ``P`` to the polynomials singular at
a unit vector ``x`` is ``sqrt(delta_P(x))`` with

    delta_P(x) = P(x)**2 + |grad_T P(x)|**2 / d = (1 - d) P(x)**2 + |grad P(x)|**2 / d,

and the distance to the discriminant is the minimum of that over the sphere.
The minimum is located by multi-start Riemannian Newton descent.
"""

from __future__ import annotations

import logging
import math
import warnings
from dataclasses import asdict, dataclass, field

import numpy as np

from . import sphere
from .algebra import HomogeneousPoly, basis_matrices, bombieri_norm
from .errors import DegreeError, SearchFailure

log = logging.getLogger(__name__)

FORMAT_VERSION = 1


@dataclass(frozen=True)
class SearchConfig:
    restarts: int = 64
    max_newton_iters: int = 100
    grad_tol: float = 1e-11
    cluster_angle: float = 1e-6
    seed: int = 0
    value_rtol: float = 1e-9
    warmup_steps: int = 5
    seed_with_critical: bool = True

    def __post_init__(self):
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        for name in ("grad_tol", "cluster_angle", "value_rtol"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be > 0")

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class DistanceReport:
    dist: float
    minimizers: tuple[np.ndarray, ...]
    delta_at_minimizers: tuple[float, ...]
    possibly_continuum: bool
    config: SearchConfig
    diagnostics: dict = field(default_factory=dict, compare=False)

    def to_json(self) -> dict:
        return {
            "format": FORMAT_VERSION,
            "dist": self.dist,
            "minimizers": [[float(v) for v in c] for c in self.minimizers],
            "delta": [float(v) for v in self.delta_at_minimizers],
            "continuum": bool(self.possibly_continuum),
            "config": self.config.to_dict(),
        }


# --------------------------------------------------------------------------
# pointwise quantities


def delta(P: HomogeneousPoly, x) -> float:
    """Squared distance from ``P`` to the polynomials singular at unit ``x``."""
    if P.d < 2:
        raise DegreeError("delta requires degree >= 2")
    x = np.asarray(x, dtype=np.float64)
    v, g = P.jet(x, 1)
    v, g = v[0], g[0]
    gt = g - P.d * v * x
    first = v * v + np.dot(gt, gt) / P.d
    second = (1 - P.d) * v * v + np.dot(g, g) / P.d
    scale = v * v + np.dot(g, g) / P.d
    assert abs(first - second) <= 1e-10 * max(scale, 1e-300), (first, second)
    return float(first)


def delta_many(P: HomogeneousPoly, X) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    v, g = P.jet(X, 1)
    gt = g - P.d * v[:, None] * X
    return v * v + np.einsum("mi,mi->m", gt, gt) / P.d


def delta_objective(P: HomogeneousPoly):
    """Value, Euclidean gradient and Hessian of ``(1-d) P**2 + |grad P|**2 / d``.

    The extension off the sphere is homogeneous of degree ``2d - 2``; on the
    sphere it coincides with ``delta_P``.
    """
    d = P.d

    def fun(X):
        v, g, H, T = P.jet(X, 3)
        val = (1 - d) * v * v + np.einsum("mi,mi->m", g, g) / d
        Hg = np.einsum("mij,mj->mi", H, g)
        eg = 2 * (1 - d) * v[:, None] * g + (2.0 / d) * Hg
        eh = 2 * (1 - d) * (np.einsum("mi,mj->mij", g, g) + v[:, None, None] * H)
        eh += (2.0 / d) * (np.einsum("mik,mkj->mij", H, H) + np.einsum("mijk,mk->mij", T, g))
        return val, eg, eh

    return fun


def tangential_delta_gradient(P: HomogeneousPoly, x) -> np.ndarray:
    """Riemannian gradient of ``delta_P``: ``(2/d) H_T P(x) grad_T P(x)``."""
    x = np.asarray(x, dtype=np.float64)
    v, g, H = P.jet(x, 2)
    v, g, H = v[0], g[0], H[0]
    gt = g - P.d * v * x
    Pi = np.eye(P.n) - np.outer(x, x)
    return (2.0 / P.d) * (Pi @ H @ Pi) @ gt


def distance_general_at(P: HomogeneousPoly, x) -> float:
    """``sqrt(grad P(x)^T M(x) grad P(x))`` using the basis-matrix formula."""
    x = np.asarray(x, dtype=np.float64)
    bm = basis_matrices(P.n, P.d, x)
    g = P.jet(x, 1)[1][0]
    return math.sqrt(max(float(g @ bm.M @ g), 0.0))


# --------------------------------------------------------------------------
# searches


def _starts(P: HomogeneousPoly, cfg: SearchConfig, rng: np.random.Generator) -> np.ndarray:
    n = P.n
    rand = sphere.normalize_rows(rng.standard_normal((cfg.restarts, n)))
    axes = np.vstack([np.eye(n), -np.eye(n)])
    # nudge axis points so they are not exactly on symmetry planes
    axes = sphere.normalize_rows(axes + 1e-7 * rng.standard_normal(axes.shape))
    return np.vstack([rand, axes])


def _dedup(X: np.ndarray, values: np.ndarray, angle: float):
    """Sign-canonicalize, sort by (value, lexicographic point) and cluster."""
    Xc = sphere.canonical_sign(X)
    order = sorted(range(len(values)), key=lambda k: (round(float(values[k]), 15), tuple(-Xc[k])))
    Xc, values = Xc[order], values[order]
    groups = sphere.cluster(Xc, angle)
    return Xc, values, groups, order


def critical_points(P: HomogeneousPoly, cfg: SearchConfig | None = None) -> list[np.ndarray]:
    """Critical points of ``P`` on the sphere, one per antipodal pair,
    sorted by ``(|P|, point)``."""
    cfg = cfg or SearchConfig()
    if P.d < 2:
        raise DegreeError("critical points require degree >= 2")
    rng = np.random.default_rng([cfg.seed, 1])
    scale = P.d * bombieri_norm(P)
    d = P.d

    def fun(X):
        v, g, H = P.jet(X, 2)
        return v, g, H

    X0 = _starts(P, cfg, rng)
    res = sphere.find_roots(
        fun,
        X0,
        grad_tol=cfg.grad_tol * scale,
        curvature_floor=1e-10 * d * scale,
        max_iters=cfg.max_newton_iters,
    )
    X = res.X[res.converged]
    if len(X) == 0:
        warnings.warn("critical point search found no critical point", RuntimeWarning, stacklevel=2)
        return []
    vals = np.abs(P.eval_many(X))
    Xc, vals, groups, _ = _dedup(X, vals, cfg.cluster_angle)
    pts = [Xc[g[0]] for g in groups]
    # the max and min of P are critical; they form one antipodal pair when d is odd
    expected = 1 if P.d % 2 else 2
    if len(pts) < expected:
        log.warning("only %d critical pair(s) found, expected at least %d", len(pts), expected)
    return pts


def critical_value_bound(P: HomogeneousPoly, cfg: SearchConfig | None = None) -> float:
    """Smallest absolute critical value of ``P``; an upper bound for the distance."""
    pts = critical_points(P, cfg)
    if not pts:
        raise SearchFailure("no critical points found")
    return float(min(abs(P(c)) for c in pts))


@dataclass(frozen=True)
class LocalMinima:
    """Converged local minima of ``delta_P``, one per antipodal pair, sorted by value."""

    points: np.ndarray
    values: np.ndarray
    curvature: np.ndarray
    hits: np.ndarray
    diagnostics: dict = field(default_factory=dict, compare=False)


def _search(P: HomogeneousPoly, cfg: SearchConfig, X0: np.ndarray | None = None):
    if P.d < 2:
        raise DegreeError("distance requires degree >= 2")
    if P.is_zero():
        raise ValueError("the zero polynomial lies on the discriminant")
    norm = bombieri_norm(P)
    scale = P.d * P.d * norm * norm
    if X0 is None:
        rng = np.random.default_rng([cfg.seed, 0])
        X0 = _starts(P, cfg, rng)
        if cfg.seed_with_critical:
            crit = critical_points(P, cfg)
            if crit:
                X0 = np.vstack([X0, np.array(crit)])
    res = sphere.minimize(
        delta_objective(P),
        lambda Y: delta_many(P, Y),
        X0,
        grad_tol=cfg.grad_tol * scale,
        curvature_floor=1e-8 * scale,
        max_iters=cfg.max_newton_iters,
        warmup_steps=cfg.warmup_steps,
    )
    diagnostics = {
        "starts": int(len(X0)),
        "converged": int(res.converged.sum()),
        "max_iterations": int(res.iterations.max()),
    }
    if not res.converged.any():
        raise SearchFailure("no restart converged", {**diagnostics, "best_grad": float(res.grad_norm.min())})
    return res, diagnostics, norm, scale


def delta_local_minima(P: HomogeneousPoly, cfg: SearchConfig | None = None, X0: np.ndarray | None = None) -> LocalMinima:
    """All distinct local minima reached from the starts (or from ``X0``)."""
    cfg = cfg or SearchConfig()
    res, diagnostics, norm, scale = _search(P, cfg, X0)
    ok = res.converged & (res.min_curvature > -1e-6 * scale)
    if not ok.any():
        ok = res.converged
    X = res.X[ok]
    vals = delta_many(P, X)
    Xc, v_sorted, groups, order = _dedup(X, vals, cfg.cluster_angle)
    curv = res.min_curvature[ok][order]
    reps = [g[0] for g in groups]
    return LocalMinima(
        points=Xc[reps],
        values=v_sorted[reps],
        curvature=curv[reps],
        hits=np.array([len(g) for g in groups]),
        diagnostics=diagnostics,
    )


def distance_bombieri(P: HomogeneousPoly, cfg: SearchConfig | None = None) -> DistanceReport:
    """Global minimum of ``sqrt(delta_P)`` over the unit sphere."""
    cfg = cfg or SearchConfig()
    if P.d == 1 and not P.is_zero():
        # delta is the constant |grad P|^2 = ||P||^2: every point realizes it
        norm = bombieri_norm(P)
        return DistanceReport(norm, (), (), True, cfg, {"linear": True})
    res, diagnostics, norm, scale = _search(P, cfg)
    X = res.X[res.converged]
    vals = delta_many(P, X)
    curv = res.min_curvature[res.converged]
    best = float(vals.min())
    tol = cfg.value_rtol * max(best, 0.0) + 1e-14 * norm * norm
    at_min = vals <= best + tol
    Xc, v_sorted, groups, order = _dedup(X[at_min], vals[at_min], cfg.cluster_angle)
    curv_sorted = curv[at_min][order]
    minimizers = tuple(Xc[g[0]] for g in groups)
    deltas = tuple(float(v_sorted[g[0]]) for g in groups)
    hits = int(at_min.sum())
    flat = bool(np.any(np.abs(curv_sorted) < 1e-6 * scale))
    possibly_continuum = (len(groups) >= 0.75 * cfg.restarts) or (len(groups) >= 3 and flat)
    diagnostics.update({"hits_at_min": hits, "clusters": len(groups), "flat_minimizer": flat})
    dist = math.sqrt(max(min(deltas), 0.0))
    return DistanceReport(dist, minimizers, deltas, possibly_continuum, cfg, diagnostics)
