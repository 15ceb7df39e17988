"""Metric consequences of a positive distance to the discriminant.

With ``m = dist(P)`` and ``alpha = sqrt(2 m / ||P||) / d``:

* the open cap of radius ``alpha`` around a critical point minimizing
  ``delta_P`` contains no zero of ``P``;
* distinct components of the zero set are at least ``2 alpha`` apart;
* on the band ``|P| < m`` one has ``|grad_T P|^2 > d (m^2 - P^2)`` for locally
  extremal ``P``, so an integral curve of ``grad_T P`` from level ``a`` to
  level ``b`` has length below ``|arcsin(b/m) - arcsin(a/m)| / sqrt(d)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import sphere
from .algebra import HomogeneousPoly, bombieri_norm, tangent_basis
from .errors import DomainError

EDGE = 1e-6


@dataclass(frozen=True)
class BoundsReport:
    cap_radius: float
    separation: float
    band_half_width: float
    notes: str = ""

    def to_json(self, d: int) -> dict:
        return {
            "cap_radius": self.cap_radius,
            "separation": self.separation,
            "band_half_width": self.band_half_width,
            "band_bound_pi_over_sqrt_d": math.pi / math.sqrt(d),
            "notes": self.notes,
        }


def cap_radius(P: HomogeneousPoly, dist: float) -> float:
    if not dist > 0:
        raise DomainError("cap radius needs dist > 0")
    return math.sqrt(2.0 * dist / bombieri_norm(P)) / P.d


def separation_bound(P: HomogeneousPoly, dist: float) -> float:
    return 2.0 * cap_radius(P, dist)


def bounds_report(P: HomogeneousPoly, dist: float, notes: str = "") -> BoundsReport:
    a = cap_radius(P, dist)
    return BoundsReport(cap_radius=a, separation=2 * a, band_half_width=dist, notes=notes)


# --------------------------------------------------------------------------
# caps


def sample_cap(x, radius: float, samples: int, rng: np.random.Generator) -> np.ndarray:
    """Area-uniform samples of the open geodesic cap of ``radius`` about unit ``x``."""
    x = np.asarray(x, dtype=np.float64)
    n = x.size
    U = tangent_basis(x)
    # inverse CDF of the polar density sin(rho)^(n-2) on [0, radius)
    grid = np.linspace(0.0, radius, 4097)
    dens = np.sin(grid) ** (n - 2)
    cdf = np.concatenate([[0.0], np.cumsum(0.5 * (dens[1:] + dens[:-1]) * np.diff(grid))])
    cdf /= cdf[-1]
    rho = np.interp(rng.uniform(0.0, 1.0, samples), cdf, grid)
    w = sphere.normalize_rows(rng.standard_normal((samples, n - 1))) @ U.T
    return np.cos(rho)[:, None] * x[None, :] + np.sin(rho)[:, None] * w


def empirical_cap_check(
    P: HomogeneousPoly,
    x,
    dist: float,
    samples: int = 10_000,
    radius_factor: float = 1.0,
    seed: int = 0,
    crit_tol: float = 1e-6,
) -> bool:
    """True iff ``P`` keeps one strict sign on sampled points of the cap about ``x``."""
    x = np.asarray(x, dtype=np.float64)
    x = x / np.linalg.norm(x)
    v, g = P.jet(x, 1)
    gt = g[0] - P.d * v[0] * x
    if np.linalg.norm(gt) > crit_tol * P.d * bombieri_norm(P):
        raise DomainError("cap check requires a critical point of P")
    rng = np.random.default_rng([seed, 3])
    pts = sample_cap(x, radius_factor * cap_radius(P, dist), samples, rng)
    vals = P.eval_many(pts)
    return bool(np.all(vals > 0) or np.all(vals < 0))


# --------------------------------------------------------------------------
# critical band


def band_length_bound(a: float, b: float, m: float, d: int) -> float:
    if not m > 0:
        raise DomainError("m must be > 0")
    if abs(a) >= m or abs(b) >= m:
        raise DomainError("levels must lie strictly inside the band")
    return abs(math.asin(b / m) - math.asin(a / m)) / math.sqrt(d)


def band_gradient_margins(P: HomogeneousPoly, m: float, samples: int = 10_000, seed: int = 0, max_draws: int = 100):
    """Sample ``samples`` points with ``|P| < m`` and return
    ``|grad_T P|^2 - d (m^2 - P^2)`` at each of them."""
    rng = np.random.default_rng([seed, 4])
    out = []
    have = 0
    for _ in range(max_draws):
        X = sphere.normalize_rows(rng.standard_normal((samples, P.n)))
        v, g = P.jet(X, 1)
        band = np.abs(v) < m
        if not band.any():
            continue
        v, g, X = v[band], g[band], X[band]
        gt = g - P.d * v[:, None] * X
        out.append(np.einsum("mi,mi->m", gt, gt) - P.d * (m * m - v * v))
        have += int(band.sum())
        if have >= samples:
            break
    if not out:
        raise DomainError("no sample fell in the band")
    return np.concatenate(out)[:samples]


@dataclass(frozen=True)
class TraceResult:
    arc_length: float
    a: float
    b: float
    bound: float
    stagnated: bool
    steps: int

    @property
    def within_bound(self) -> bool:
        return self.arc_length <= self.bound


def _flow(P: HomogeneousPoly, sign: float):
    def f(x):
        v, g = P.jet(x, 1)
        gt = g[0] - P.d * v[0] * x
        nrm = np.linalg.norm(gt)
        return sign * gt / nrm if nrm > 0 else gt, nrm

    return f


def _rk4(f, x, h):
    k1, n1 = f(x)
    k2, n2 = f(x + 0.5 * h * k1)
    k3, n3 = f(x + 0.5 * h * k2)
    k4, n4 = f(x + h * k3)
    y = x + h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
    return y / np.linalg.norm(y), min(n1, n2, n3, n4)


def _trace_half(P, x0, m, sign, h_min, h_max, tol, stall_tol, max_steps):
    """Follow the unit-speed flow of ``sign * grad_T P`` until ``sign * P`` reaches ``m (1 - EDGE)``."""
    f = _flow(P, sign)
    target = m * (1 - EDGE)
    x = x0.copy()
    length = 0.0
    h = h_max
    steps = 0
    while steps < max_steps:
        val = P(x)
        if sign * val >= target:
            return x, length, False, steps
        full, nrm = _rk4(f, x, h)
        if nrm < stall_tol:
            return x, length, True, steps
        half, _ = _rk4(f, x, 0.5 * h)
        half, _ = _rk4(f, half, 0.5 * h)
        err = np.linalg.norm(full - half)
        if err > tol and h > h_min:
            h = max(0.5 * h, h_min)
            continue
        y = half
        if sign * P(y) > target:
            # bisect the step to land on the band edge
            lo, hi = 0.0, h
            for _ in range(60):
                mid = 0.5 * (lo + hi)
                z, _ = _rk4(f, x, mid)
                if sign * P(z) > target:
                    hi = mid
                else:
                    lo = mid
            y, _ = _rk4(f, x, hi)
        length += math.acos(min(1.0, float(np.dot(x, y))))
        x = y
        steps += 1
        if err < 0.1 * tol:
            h = min(2 * h, h_max)
    return x, length, True, steps


def trace_gradient_curve(
    P: HomogeneousPoly,
    start,
    m: float,
    h_min: float = 1e-6,
    h_max: float = 1e-2,
    tol: float = 1e-10,
    max_steps: int = 200_000,
) -> TraceResult:
    """Arc length of the integral curve of ``grad_T P`` through ``start``
    across the band ``|P| < m``."""
    x0 = np.asarray(start, dtype=np.float64)
    x0 = x0 / np.linalg.norm(x0)
    if abs(P(x0)) >= m:
        raise DomainError("start point lies outside the band")
    stall_tol = 1e-10 * P.d * bombieri_norm(P)
    xf, lf, sf, nf = _trace_half(P, x0, m, 1.0, h_min, h_max, tol, stall_tol, max_steps)
    xb, lb, sb, nb = _trace_half(P, x0, m, -1.0, h_min, h_max, tol, stall_tol, max_steps)
    a, b = float(P(xb)), float(P(xf))
    ca = max(min(a, m * (1 - 1e-15)), -m * (1 - 1e-15))
    cb = max(min(b, m * (1 - 1e-15)), -m * (1 - 1e-15))
    return TraceResult(
        arc_length=lf + lb,
        a=a,
        b=b,
        bound=band_length_bound(ca, cb, m, P.d),
        stagnated=sf or sb,
        steps=nf + nb,
    )
