"""Binary forms viewed as trigonometric polynomials ``theta -> P(cos theta, sin theta)``.

Includes the family ``T_{r,d}`` with ``T(cos t, sin t) = cos(r t)``, its
closed-form distance to the discriminant, the cosine-power expansion
identities for ``cos(r t)`` and ``sin(r t)``, and the Gram matrix of powers of
linear forms on the circle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .algebra import HomogeneousPoly, bombieri_dot, bombieri_norm, normalized
from .distance import SearchConfig, distance_bombieri
from .errors import DegenerateError, DomainError, ShapeError


@dataclass(frozen=True)
class TrigSample:
    theta: float
    value: float
    derivative: float
    second_derivative: float


def trig_sample(P: HomogeneousPoly, theta: float) -> TrigSample:
    """Value and first two derivatives of ``theta -> P(u_theta)``."""
    if P.n != 2:
        raise ShapeError("trigonometric view requires n = 2")
    u = np.array([math.cos(theta), math.sin(theta)])
    uperp = np.array([-u[1], u[0]])
    if P.d >= 2:
        v, g, H = P.jet(u, 2)
        second = float(uperp @ H[0] @ uperp - P.d * v[0])
    else:
        v, g = P.jet(u, 1)
        second = float(-P.d * v[0])
    return TrigSample(theta, float(v[0]), float(g[0] @ uperp), second)


def _check_rd(r: int, d: int) -> None:
    if not (1 <= r <= d) or (d - r) % 2:
        raise DomainError(f"need 1 <= r <= d with d - r even, got r={r}, d={d}")


def T_coefficients(r: int, d: int) -> dict[tuple[int, int], int]:
    """Exact integer coefficients of ``(x^2+y^2)^((d-r)/2) Re((x+iy)^r)``."""
    _check_rd(r, d)
    m = (d - r) // 2
    out: dict[tuple[int, int], int] = {}
    for k in range(r // 2 + 1):
        ck = (-1) ** k * math.comb(r, 2 * k)
        for j in range(m + 1):
            ey = 2 * k + 2 * j
            key = (d - ey, ey)
            out[key] = out.get(key, 0) + ck * math.comb(m, j)
    return {k: v for k, v in out.items() if v}


def S_coefficients(d: int) -> dict[tuple[int, int], int]:
    """Exact integer coefficients of ``Im((x+iy)^d)``."""
    if d < 1:
        raise DomainError("d must be >= 1")
    return {
        (d - 2 * k - 1, 2 * k + 1): (-1) ** k * math.comb(d, 2 * k + 1)
        for k in range((d - 1) // 2 + 1)
    }


def make_T(r: int, d: int) -> HomogeneousPoly:
    return HomogeneousPoly.from_dict(2, d, T_coefficients(r, d))


def make_C(d: int) -> HomogeneousPoly:
    return make_T(d, d)


def make_S(d: int) -> HomogeneousPoly:
    return HomogeneousPoly.from_dict(2, d, S_coefficients(d))


def closed_form_distance(r: int, d: int) -> float:
    """Distance of the unnormalized ``T_{r,d}`` to the discriminant: ``min(1, r/sqrt(d))``."""
    _check_rd(r, d)
    return min(1.0, r / math.sqrt(d))


def closed_form_distance_normalized(r: int, d: int) -> float:
    """Same distance for ``T_{r,d} / ||T_{r,d}||``."""
    return closed_form_distance(r, d) / bombieri_norm(make_T(r, d))


def numeric_distance(r: int, d: int, cfg: SearchConfig | None = None) -> float:
    return distance_bombieri(make_T(r, d), cfg).dist


# --------------------------------------------------------------------------
# cosine-power identities


def _identity_domain(r: int, d: int) -> None:
    _check_rd(r, d)
    if not (3 * r > d):
        raise DomainError(f"identities hold for d/3 < r <= d, got r={r}, d={d}")


def identity_grid(r: int, grid_size: int = 1024) -> np.ndarray:
    """Uniform grid on ``[0, 2 pi)`` plus the identity's node angles."""
    base = 2 * np.pi * np.arange(grid_size) / grid_size
    nodes = np.concatenate([np.arange(r) * np.pi / r, (2 * np.arange(r) + 1) * np.pi / (2 * r)])
    return np.concatenate([base, nodes])


def trig_identity_errors(r: int, d: int, grid_size: int = 1024) -> dict[str, float]:
    """Max grid error of the cosine and sine expansions of ``cos(r t)``, ``sin(r t)``
    into alternating sums of ``cos^d`` at equally spaced shifts."""
    _identity_domain(r, d)
    th = identity_grid(r, grid_size)
    K = 2.0 ** (d - 1) / (r * math.comb(d, (d - r) // 2))
    k = np.arange(r)
    signs = (-1.0) ** k
    cos_sum = (signs[None, :] * np.cos(th[:, None] - k[None, :] * np.pi / r) ** d).sum(axis=1)
    sin_sum = (signs[None, :] * np.cos(th[:, None] - (2 * k[None, :] + 1) * np.pi / (2 * r)) ** d).sum(axis=1)
    return {
        "cos": float(np.max(np.abs(np.cos(r * th) - K * cos_sum))),
        "sin": float(np.max(np.abs(np.sin(r * th) - K * sin_sum))),
    }


def trig_identity_error(r: int, d: int, grid_size: int = 1024) -> float:
    return max(trig_identity_errors(r, d, grid_size).values())


def valid_identity_pairs(dmax: int) -> list[tuple[int, int]]:
    """All ``(r, d)`` with ``d <= dmax`` in the identities' domain."""
    return [(r, d) for d in range(1, dmax + 1) for r in range(1, d + 1) if (d - r) % 2 == 0 and 3 * r > d]


# --------------------------------------------------------------------------
# Gram matrix of powers of linear forms on the circle


@dataclass(frozen=True)
class GramPowers:
    G: np.ndarray
    detV: float
    V: np.ndarray
    factor_error: float


def gram_powers(thetas, d: int, tol: float = 1e-12) -> GramPowers:
    """Gram matrix ``cos^d(theta_i - theta_j)`` of ``<x|u_theta_i>^d`` and its
    factorization ``V^T D V`` with ``D = diag(binom(d, k))``."""
    th = np.asarray(thetas, dtype=np.float64)
    if th.shape != (d + 1,):
        raise ShapeError(f"need d + 1 = {d + 1} angles")
    diff = th[:, None] - th[None, :]
    S = np.sin(diff)
    off = ~np.eye(d + 1, dtype=bool)
    if np.any(np.abs(S[off]) < tol):
        raise DegenerateError("angles must be pairwise distinct modulo pi")
    G = np.cos(diff) ** d
    k = np.arange(d + 1)
    V = np.cos(th)[None, :] ** k[:, None] * np.sin(th)[None, :] ** (d - k)[:, None]
    D = np.array([math.comb(d, int(j)) for j in k], dtype=np.float64)
    err = float(np.max(np.abs(G - V.T @ (D[:, None] * V))))
    iu = np.triu_indices(d + 1, 1)
    detV = float(np.prod(S[iu]))
    return GramPowers(G=G, detV=detV, V=V, factor_error=err)


# --------------------------------------------------------------------------
# local maximality probe around C_d


def local_max_probe(d: int, samples: int = 50, eps: float = 1e-3, seed: int = 0, cfg: SearchConfig | None = None):
    """Compare ``dist(C_d/||C_d||)`` with random unit-norm polynomials at
    Bombieri distance ``eps`` off the span of ``C_d`` and ``S_d``.

    Returns ``(base_dist, perturbed_dists)``.
    """
    cfg = cfg or SearchConfig(seed=seed)
    rng = np.random.default_rng(seed)
    C = normalized(make_C(d))
    S = normalized(make_S(d))
    base = distance_bombieri(C, cfg).dist
    out = []
    for _ in range(samples):
        Q = HomogeneousPoly(2, d, rng.standard_normal(d + 1))
        Q = Q - bombieri_dot(Q, C) * C - bombieri_dot(Q, S) * S
        Q = normalized(Q)
        P = normalized(C + eps * Q)
        out.append(distance_bombieri(P, cfg).dist)
    return base, np.array(out)
