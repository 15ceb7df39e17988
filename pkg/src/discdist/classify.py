"""Quasi-singular points: the sphere points where the distance to the
discriminant is attained.

A quasi-singular point ``c`` is *quasi-double* when it is also a critical
point of ``P`` on the sphere and *quasi-cusp* otherwise; in the latter case
``grad_T P(c)`` is a nonzero kernel vector of ``H_T P(c)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from .algebra import (
    HomogeneousPoly,
    OrthogonalMap,
    bombieri_norm,
    compose_orthogonal,
    monomial_index,
    pow_linear_form,
    prod_linear_forms,
    tangent_basis,
)
from .distance import DistanceReport, SearchConfig, distance_bombieri
from .errors import (
    DegenerateError,
    ImpossibleKindError,
    InconsistentClassificationError,
    NotQuasiSingularError,
)

Kind = Literal["double", "cusp"]

CLASSIFY_TOL = 1e-8
NECESSARY_TOL = 1e-8
VALIDATE_TOL = 1e-7


@dataclass(frozen=True)
class QuasiSingularPoint:
    c: np.ndarray
    kind: Kind
    value: float
    tangential_grad: np.ndarray
    delta: float
    ht_eigenvalues: tuple[float, ...]

    @property
    def beta(self) -> float:
        return float(np.linalg.norm(self.tangential_grad))


@dataclass(frozen=True)
class CanonicalFrame:
    rotation: OrthogonalMap
    alpha: float
    beta: float
    lambdas: tuple[float, ...]
    mus: tuple[float, ...] | None
    rotated: HomogeneousPoly = field(repr=False)
    kernel_dim: int = 0


def _local_data(P: HomogeneousPoly, c):
    c = np.asarray(c, dtype=np.float64)
    c = c / np.linalg.norm(c)
    v, g, H = P.jet(c, 2)
    v, g, H = float(v[0]), g[0], H[0]
    gt = g - P.d * v * c
    Pi = np.eye(P.n) - np.outer(c, c)
    HT = Pi @ H @ Pi
    return c, v, gt, 0.5 * (HT + HT.T)


def classify(
    P: HomogeneousPoly,
    c,
    classify_tol: float = CLASSIFY_TOL,
    necessary_tol: float = NECESSARY_TOL,
) -> QuasiSingularPoint:
    """Decide quasi-double vs quasi-cusp at a (numerical) minimizer of ``delta_P``."""
    if P.d < 2:
        raise ValueError("classification requires degree >= 2")
    c, v, gt, HT = _local_data(P, c)
    norm = bombieri_norm(P)
    d = P.d
    residual = np.linalg.norm(HT @ gt)
    if residual > necessary_tol * d * (d - 1) * d * norm * norm:
        raise NotQuasiSingularError(
            f"|H_T grad_T| = {residual:.3e} violates the first-order condition at {c}"
        )
    U = tangent_basis(c)
    eig = np.linalg.eigvalsh(U.T @ HT @ U)
    beta = float(np.linalg.norm(gt))
    kind: Kind = "double" if beta <= classify_tol * d * norm else "cusp"
    return QuasiSingularPoint(
        c=c,
        kind=kind,
        value=v,
        tangential_grad=gt,
        delta=v * v + beta * beta / d,
        ht_eigenvalues=tuple(float(e) for e in eig),
    )


def classify_report(P: HomogeneousPoly, report: DistanceReport, **kw) -> list[QuasiSingularPoint]:
    return [classify(P, c, **kw) for c in report.minimizers]


def find_quasi_singular(
    P: HomogeneousPoly,
    cfg: SearchConfig | None = None,
    report: DistanceReport | None = None,
    classify_tol: float = CLASSIFY_TOL,
) -> list[QuasiSingularPoint]:
    """Classified minimizers of ``delta_P``, one per antipodal pair."""
    if report is None:
        report = distance_bombieri(P, cfg)
    if report.dist <= 1e-9 * bombieri_norm(P):
        raise DegenerateError(f"dist = {report.dist:.3e}: P lies on the discriminant")
    return classify_report(P, report, classify_tol=classify_tol)


def contact_radius(P: HomogeneousPoly, c) -> HomogeneousPoly:
    """Smallest polynomial whose addition makes ``P`` singular at ``c``:
    ``-P(c) <x|c>**d - <x|grad_T P(c)> <x|c>**(d-1)``."""
    c, v, gt, _ = _local_data(P, c)
    R = -v * pow_linear_form(c, P.d)
    if np.any(gt):
        R = R - prod_linear_forms([gt] + [c] * (P.d - 1))
    return R


def contact_polynomial(P: HomogeneousPoly, c) -> HomogeneousPoly:
    return P + contact_radius(P, c)


# --------------------------------------------------------------------------
# canonical coordinates


def _coef(Q: HomogeneousPoly, alpha) -> float:
    return float(Q.coef[monomial_index(Q.n, Q.d)[tuple(alpha)]])


def _exp(n: int, **powers) -> tuple[int, ...]:
    e = [0] * n
    for k, p in powers.items():
        e[int(k[1:])] += p
    return tuple(e)


def canonical_frame(
    P: HomogeneousPoly,
    c,
    kind: Kind | None = None,
    classify_tol: float = CLASSIFY_TOL,
    kernel_tol: float = 1e-7,
) -> CanonicalFrame:
    """Rotate so that ``c`` becomes the last axis and read off the local
    normal form coefficients.

    The frame sends ``e_n`` to ``c`` and ``e_1`` to the unit tangential
    gradient (cusp case) or to the dominant tangent eigenvector of
    ``H_T P(c)`` (double case); the other tangent axes diagonalize
    ``H_T P(c)``.  In the cusp case, axes inside the kernel of ``H_T P(c)``
    are further rotated to diagonalize the Hessian of ``dP/dx_1`` there.
    """
    c, v, gt, HT = _local_data(P, c)
    n, d = P.n, P.d
    norm = bombieri_norm(P)
    beta = float(np.linalg.norm(gt))
    is_cusp = beta > classify_tol * d * norm
    if kind == "cusp" and not is_cusp:
        raise InconsistentClassificationError(
            f"cusp frame requested but |grad_T P(c)| = {beta:.3e} is below threshold"
        )
    if kind == "double":
        is_cusp = False

    if is_cusp:
        f1 = gt / beta
        # tangent directions orthogonal to both c and f1
        Q, _ = np.linalg.qr(np.column_stack([c, f1, np.eye(n)]))
        rest = Q[:, 2:n]
        lam, vec = np.linalg.eigh(rest.T @ HT @ rest)
        order = np.argsort(-np.abs(lam), kind="stable")
        lam, others = lam[order], rest @ vec[:, order]
        ker = np.abs(lam) <= kernel_tol * d * (d - 1) * norm
        if ker.sum() > 1:
            # diagonalize the third derivative contracted with f1 on the kernel
            T = P.jet(c, 3)[3][0]
            K = np.einsum("ijk,i->jk", T, f1)
            idx = np.flatnonzero(ker)
            W = others[:, idx]
            _, kv = np.linalg.eigh(W.T @ K @ W)
            others[:, idx] = W @ kv
        frame = np.column_stack([f1, others, c])
    else:
        U = tangent_basis(c)
        lam, vec = np.linalg.eigh(U.T @ HT @ U)
        order = np.argsort(-np.abs(lam), kind="stable")
        frame = np.column_stack([U @ vec[:, order], c])
        ker = np.zeros(0, dtype=bool)

    # re-orthonormalize against round-off
    q, r = np.linalg.qr(frame)
    frame = q * np.sign(np.diag(r))
    h = OrthogonalMap(frame)
    rotated = compose_orthogonal(P, h)

    alpha = _coef(rotated, _exp(n, **{f"x{n-1}": d}))
    beta_rot = _coef(rotated, _exp(n, x0=1, **{f"x{n-1}": d - 1})) if n > 1 else 0.0
    start = 1 if is_cusp else 0
    lambdas = tuple(
        2.0 * _coef(rotated, _exp(n, **{f"x{i}": 2, f"x{n-1}": d - 2})) for i in range(start, n - 1)
    )
    mus = None
    if is_cusp:
        if d < 3:
            raise ImpossibleKindError("quasi-cusp points require degree >= 3")
        mu1 = 6.0 * _coef(rotated, _exp(n, x0=3, **{f"x{n-1}": d - 3}))
        mus = (mu1,) + tuple(
            2.0 * _coef(rotated, _exp(n, x0=1, **{f"x{i}": 2, f"x{n-1}": d - 3})) for i in range(1, n - 1)
        )
    return CanonicalFrame(
        rotation=h,
        alpha=alpha,
        beta=beta_rot if is_cusp else 0.0,
        lambdas=lambdas,
        mus=mus,
        rotated=rotated,
        kernel_dim=int(ker.sum()) + (2 if is_cusp else 1),
    )


# --------------------------------------------------------------------------
# necessary conditions at distance-realizing points


def validate_quasi_double(P: HomogeneousPoly, c, tol: float = VALIDATE_TOL) -> dict:
    """Check ``|lambda| >= d |P(c)|`` for tangent eigenvalues sharing the sign of ``P(c)``.

    A failure shows ``c`` cannot realize the distance; a pass certifies nothing.
    """
    c, v, _, HT = _local_data(P, c)
    d = P.d
    scale = d * (d - 1) * bombieri_norm(P)
    U = tangent_basis(c)
    eig = np.linalg.eigvalsh(U.T @ HT @ U)
    checks = []
    for lam in eig:
        applies = bool(lam * v > 0)
        ok = (not applies) or abs(lam) >= d * abs(v) - tol * scale
        checks.append({"lambda": float(lam), "applies": applies, "pass": bool(ok)})
    return {
        "kind": "double",
        "value": v,
        "checks": checks,
        "passed": all(ch["pass"] for ch in checks),
    }


def validate_quasi_cusp(P: HomogeneousPoly, c, tol: float = VALIDATE_TOL) -> dict:
    """Sign condition on ``beta, mu_1..mu_k`` and the quadratic inequality
    ``(1-d) beta**2 - d alpha lambda_i + lambda_i**2 + beta mu_i >= 0``."""
    d = P.d
    if d < 3:
        raise ImpossibleKindError("quasi-cusp points exist only for degree > 2")
    fr = canonical_frame(P, c, kind="cusp")
    norm = bombieri_norm(P)
    scale = (d * d * norm) ** 2
    a, b = fr.alpha, fr.beta
    mu1, mus_rest = fr.mus[0], fr.mus[1:]
    lam_rest = fr.lambdas  # lambdas for axes 2..n-1
    kernel_eps = 1e-7 * d * (d - 1) * norm
    signed = [mu1] + [m for m, lam in zip(mus_rest, lam_rest) if abs(lam) <= kernel_eps]
    sign_ok = all(m * b > 0 for m in signed)
    first_ok = b * (2 * (1 - d) * b + mu1) >= -tol * scale
    ineqs = []
    for lam, mu in zip(lam_rest, mus_rest):
        val = (1 - d) * b * b - d * a * lam + lam * lam + b * mu
        ineqs.append({"lambda": lam, "mu": mu, "value": val, "pass": bool(val >= -tol * scale)})
    return {
        "kind": "cusp",
        "alpha": a,
        "beta": b,
        "mus": list(fr.mus),
        "lambdas": list(fr.lambdas),
        "same_sign": bool(sign_ok),
        "first_direction": bool(first_ok),
        "inequalities": ineqs,
        "passed": bool(sign_ok and first_ok and all(i["pass"] for i in ineqs)),
    }


def classification_record(P: HomogeneousPoly, q: QuasiSingularPoint) -> dict:
    """JSON-ready record for one quasi-singular point."""
    if q.kind == "cusp" and P.d >= 3:
        fr = canonical_frame(P, q.c, kind="cusp")
        checks = validate_quasi_cusp(P, q.c)
        lambdas, mus, beta = list(fr.lambdas), list(fr.mus), fr.beta
    else:
        checks = validate_quasi_double(P, q.c)
        lambdas, mus, beta = list(q.ht_eigenvalues), None, q.beta
    R = contact_radius(P, q.c)
    checks = dict(checks)
    checks["contact_radius_norm"] = bombieri_norm(R)
    checks["sqrt_delta"] = math.sqrt(max(q.delta, 0.0))
    return {
        "point": [float(v) for v in q.c],
        "kind": q.kind,
        "value": q.value,
        "beta": beta,
        "lambdas": lambdas,
        "mus": mus,
        "checks": checks,
    }
