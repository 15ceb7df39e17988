"""Ascent of ``dist(P, discriminant)`` over unit-norm polynomials.

Let ``c_i`` be the (nearly) active minimizers of ``delta_P`` and ``R_i`` their
contact radii.  With ``P1`` the orthogonal projection of ``P`` onto
``span{R_i}`` and ``D = P1 - P``, moving to ``(P + tD)/||P + tD||`` raises every
active ``delta_P(c_i)`` at relative rate ``2 ||D||^2``.  ``D = 0`` is the
first-order condition for a local maximum, and then ``P`` is a combination
of the ``R_i``.

Because the objective is a minimum over several branches, ``D`` alone keeps
the gaps between active values; the step adds the minimal-norm correction
``F`` in ``span{R_i}`` that equalizes them to first order.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np

from . import sphere
from .algebra import (
    HomogeneousPoly,
    bombieri_norm,
    from_orthonormal_coordinates,
    normalized,
    orthonormal_coordinates,
    pow_linear_form,
)
from .classify import QuasiSingularPoint, classify, contact_radius
from .distance import (
    FORMAT_VERSION,
    SearchConfig,
    _dedup,
    delta_local_minima,
    delta_many,
    delta_objective,
)
from .errors import CertificateInapplicableError, DegenerateError, NotQuasiSingularError, SearchFailure
from .polyio import format_poly, parse_poly

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class OptimizeConfig:
    max_iters: int = 500
    residual_tol: float = 1e-12
    gap_tol: float = 1e-24
    initial_step: float = 1.0
    max_halvings: int = 30
    refresh_every: int = 25
    active_rtol: float = 1e-3
    # local minima above (1 + track_rtol) * min are no longer tracked
    track_rtol: float = math.inf
    sentinels: int = 512
    pinv_rcond: float = 1e-10
    # steps stay inside the ball of radius trust * dist around P, which has no singular polynomial
    trust: float = 0.9
    equalize: bool = True
    checkpoint_every: int = 25
    search: SearchConfig = field(default_factory=SearchConfig)

    def __post_init__(self):
        if self.max_iters < 0:
            raise ValueError("max_iters must be >= 0")
        if self.refresh_every < 1 or self.checkpoint_every < 1:
            raise ValueError("cadences must be >= 1")
        if self.checkpoint_every % self.refresh_every:
            # resumed runs restart with a full search, so checkpoints must sit on refresh iterations
            raise ValueError("checkpoint_every must be a multiple of refresh_every")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "OptimizeConfig":
        data = dict(data)
        data["search"] = SearchConfig(**data.get("search", {}))
        return cls(**data)


@dataclass(frozen=True)
class MaximizerState:
    P: HomogeneousPoly
    qs: tuple[QuasiSingularPoint, ...]
    radii: tuple[HomogeneousPoly, ...]
    D: HomogeneousPoly
    residual: float
    dist: float
    iteration: int
    tracked: np.ndarray = field(repr=False)
    tracked_values: np.ndarray = field(repr=False)
    coefficients: np.ndarray = field(repr=False)
    continuum_signs: tuple[bool, bool] = (False, False)
    stalled: bool = False
    # squared norm of the equalizing correction; zero when active values agree
    gap: float = 0.0

    def direction(self, equalize: bool = True, rcond: float = 1e-10) -> np.ndarray:
        d = orthonormal_coordinates(self.D)
        if equalize and len(self.qs) > 1:
            R = np.array([orthonormal_coordinates(r) for r in self.radii])
            vals = np.array([q.delta for q in self.qs])
            d = d + _equalizer(R, vals, rcond)
        return d


# --------------------------------------------------------------------------
# projection onto the contact radii


def ascent_direction(P: HomogeneousPoly, qs, rcond: float = 1e-10):
    """``(D, residual, a)`` with ``P1 = sum a_i R_i`` the projection of ``P``."""
    if not qs:
        raise ValueError("need at least one quasi-singular point")
    radii = [contact_radius(P, q.c if isinstance(q, QuasiSingularPoint) else q) for q in qs]
    D, residual, a, _ = _project(P, radii, rcond)
    return D, residual, a


def _project(P: HomogeneousPoly, radii, rcond: float):
    R = np.array([orthonormal_coordinates(r) for r in radii])
    p = orthonormal_coordinates(P)
    a, _, rank, sv = np.linalg.lstsq(R.T, p, rcond=rcond)
    if rank < len(radii):
        log.debug("contact radii are dependent: rank %d of %d", rank, len(radii))
    dcoord = R.T @ a - p
    D = from_orthonormal_coordinates(P.n, P.d, dcoord)
    return D, float(dcoord @ dcoord), a, R


def _equalizer(R: np.ndarray, values: np.ndarray, rcond: float) -> np.ndarray:
    """Minimal-norm ``F`` in span{R_i} with ``delta_i - 2 <R_i, F> = mean(delta)``."""
    b = 0.5 * (values - values.mean())
    F, *_ = np.linalg.lstsq(R, b, rcond=rcond)
    return F


# --------------------------------------------------------------------------
# state construction


def _sign_continuum(P, pts, curv, hits, cfg: SearchConfig) -> tuple[bool, bool]:
    """Per sign of ``P(c)`` (negative, positive): does the minimizing set look like a continuum?"""
    scale = P.d * P.d
    flags = []
    vals = P.eval_many(pts) if len(pts) else np.zeros(0)
    for neg in (True, False):
        sel = vals < 0 if neg else vals >= 0
        k = int(sel.sum())
        flat = bool(np.any(np.abs(curv[sel]) < 1e-6 * scale))
        flags.append(k >= 0.75 * cfg.restarts or (k >= 3 and flat))
    return flags[0], flags[1]


def _active_mask(values: np.ndarray, rtol: float) -> np.ndarray:
    best = values.min()
    return values <= best * (1 + rtol) + 1e-15


def _build_state(P, tracked, values, curv, hits, iteration, cfg: OptimizeConfig, stalled=False) -> MaximizerState:
    order = np.argsort(values, kind="stable")
    tracked, values, curv, hits = tracked[order], values[order], curv[order], hits[order]
    best = float(values[0])
    if best <= 1e-18:
        raise DegenerateError("P lies on the discriminant")
    keep = values <= best * (1 + cfg.track_rtol)
    tracked, values, curv, hits = tracked[keep], values[keep], curv[keep], hits[keep]
    active = _active_mask(values, cfg.active_rtol)
    qs = []
    for c in tracked[active]:
        try:
            qs.append(classify(P, c))
        except NotQuasiSingularError:
            log.debug("dropping unconverged tracked point %s", c)
    if not qs:
        raise SearchFailure("no active quasi-singular point could be classified")
    radii = [contact_radius(P, q.c) for q in qs]
    D, residual, a, R = _project(P, radii, cfg.pinv_rcond)
    F = _equalizer(R, np.array([q.delta for q in qs]), cfg.pinv_rcond)
    at_min = _active_mask(values, cfg.search.value_rtol)
    cont = _sign_continuum(P, tracked[at_min], curv[at_min], hits[at_min], cfg.search)
    return MaximizerState(
        P=P,
        qs=tuple(qs),
        radii=tuple(radii),
        D=D,
        residual=residual,
        dist=math.sqrt(best),
        iteration=iteration,
        tracked=tracked,
        tracked_values=values,
        coefficients=a,
        continuum_signs=cont,
        stalled=stalled,
        gap=float(F @ F),
    )


def initial_state(P0: HomogeneousPoly, cfg: OptimizeConfig | None = None, iteration: int = 0) -> MaximizerState:
    """Normalize ``P0`` and run a full multi-start search for its local minima."""
    cfg = cfg or OptimizeConfig()
    P = normalized(P0)
    lm = delta_local_minima(P, cfg.search)
    return _build_state(P, lm.points, lm.values, lm.curvature, lm.hits, iteration, cfg)


def _track(P: HomogeneousPoly, X0: np.ndarray, cfg: SearchConfig):
    """Newton-track previous minimizers to the local minima of ``delta_P``."""
    scale = P.d * P.d
    res = sphere.minimize(
        delta_objective(P),
        lambda Y: delta_many(P, Y),
        X0,
        grad_tol=cfg.grad_tol * scale,
        curvature_floor=1e-8 * scale,
        max_iters=cfg.max_newton_iters,
        warmup_steps=0,
    )
    vals = delta_many(P, res.X)
    Xc, v_sorted, groups, order = _dedup(res.X, vals, cfg.cluster_angle)
    reps = [g[0] for g in groups]
    curv = res.min_curvature[order]
    hits = np.array([len(g) for g in groups])
    return Xc[reps], v_sorted[reps], curv[reps], hits, int(res.iterations.max())


def _sentinels(n: int, cfg: OptimizeConfig) -> np.ndarray:
    rng = np.random.default_rng([cfg.search.seed, 2])
    return sphere.normalize_rows(rng.standard_normal((cfg.sentinels, n)))


def _refresh(P: HomogeneousPoly, tracked: np.ndarray, cfg: OptimizeConfig):
    """Full multi-start search, merged with the tracked points."""
    lm = delta_local_minima(P, cfg.search)
    if len(tracked):
        pts, vals, curv, hits, _ = _track(P, np.vstack([lm.points, tracked]), cfg.search)
        return pts, vals, curv, hits
    return lm.points, lm.values, lm.curvature, lm.hits


# --------------------------------------------------------------------------
# stepping


def step(state: MaximizerState, t: float, cfg: OptimizeConfig | None = None, refresh: bool = False) -> MaximizerState:
    """One monotone ascent step.

    Tries ``(P + t(D + F)) / ||...||`` and halves ``t`` until the trial is
    within ``trust * dist`` of ``P`` (so the segment cannot cross the
    discriminant) and the distance strictly increases.  Returns the old state with ``stalled=True`` when no
    trial is accepted.
    """
    cfg = cfg or OptimizeConfig()
    if not t > 0:
        raise ValueError("t must be > 0")
    P = state.P
    d_coord = state.direction(cfg.equalize, cfg.pinv_rcond)
    if not np.any(d_coord):
        return state
    p = orthonormal_coordinates(P)
    for _ in range(cfg.max_halvings + 1):
        trial = p + t * d_coord
        trial /= np.linalg.norm(trial)
        if np.linalg.norm(trial - p) >= cfg.trust * state.dist:
            t *= 0.5
            continue
        Pt = from_orthonormal_coordinates(P.n, P.d, trial)
        pts, vals, curv, hits, _ = _track(Pt, state.tracked, cfg.search)
        if float(vals.min()) > state.dist**2:
            # a minimum born away from the tracked points shows up on the sentinels
            lost = cfg.sentinels and delta_many(Pt, _sentinels(P.n, cfg)).min() < vals.min()
            if refresh or lost:
                pts, vals, curv, hits = _refresh(Pt, pts, cfg)
            new = _build_state(Pt, pts, vals, curv, hits, state.iteration + 1, cfg)
            if new.dist > state.dist:
                return new
        t *= 0.5
    return replace(state, stalled=True)


@dataclass
class RunResult:
    state: MaximizerState
    trajectory: list[dict]
    converged: bool
    stalled: bool


def is_converged(state: MaximizerState, cfg: OptimizeConfig) -> bool:
    gap_ok = state.gap <= cfg.gap_tol or not cfg.equalize
    return state.residual <= cfg.residual_tol and gap_ok


def run(
    P0: HomogeneousPoly,
    cfg: OptimizeConfig | None = None,
    checkpoint: str | Path | None = None,
    resume_state: MaximizerState | None = None,
    trajectory: list[dict] | None = None,
) -> RunResult:
    """Iterate until ``residual <= residual_tol``, stall, or the iteration budget."""
    cfg = cfg or OptimizeConfig()
    state = resume_state if resume_state is not None else initial_state(P0, cfg)
    if state.dist <= 1e-9:
        raise DegenerateError("starting polynomial lies on the discriminant")
    traj = list(trajectory or [])
    if not traj or traj[-1]["iteration"] != state.iteration:
        traj.append(_log_row(state, None))
    while True:
        if is_converged(state, cfg):
            return RunResult(state, traj, True, False)
        if state.iteration >= cfg.max_iters:
            return RunResult(state, traj, False, False)
        refresh = (state.iteration + 1) % cfg.refresh_every == 0
        new = step(state, cfg.initial_step, cfg, refresh=refresh)
        if new.stalled and not refresh:
            # tracking may have lost a minimizer; retry once from a full search
            fresh = _build_state(state.P, *_refresh(state.P, state.tracked, cfg), state.iteration, cfg)
            new = fresh if is_converged(fresh, cfg) else step(fresh, cfg.initial_step, cfg, refresh=refresh)
            if new is fresh:
                state = fresh
                continue
        if new.stalled:
            log.warning("stalled at iteration %d with residual %.3e", state.iteration, state.residual)
            return RunResult(replace(state, stalled=True), traj, False, True)
        state = new
        traj.append(_log_row(state, None))
        log.info("iter %d dist %.15g residual %.3e", state.iteration, state.dist, state.residual)
        if checkpoint is not None and state.iteration % cfg.checkpoint_every == 0:
            save_checkpoint(checkpoint, state, cfg, traj)


def _log_row(state: MaximizerState, t) -> dict:
    return {
        "iteration": state.iteration,
        "dist": state.dist,
        "residual": state.residual,
        "gap": state.gap,
        "active": len(state.qs),
    }


# --------------------------------------------------------------------------
# checkpoints


def save_checkpoint(path, state: MaximizerState, cfg: OptimizeConfig, trajectory: list[dict]) -> None:
    data = {
        "format": FORMAT_VERSION,
        "poly": format_poly(state.P).splitlines(),
        "iteration": state.iteration,
        "seed": cfg.search.seed,
        "config": cfg.to_dict(),
        "dist": state.dist,
        "residual": state.residual,
        "trajectory": trajectory,
    }
    tmp = Path(str(path) + ".tmp")
    tmp.write_text(json.dumps(data, indent=1))
    tmp.replace(path)


def load_checkpoint(path):
    """Returns ``(state, cfg, trajectory)``; the state is rebuilt by a full search."""
    data = json.loads(Path(path).read_text())
    cfg = OptimizeConfig.from_dict(data["config"])
    P = parse_poly("\n".join(data["poly"]))
    lm = delta_local_minima(P, cfg.search)
    state = _build_state(P, lm.points, lm.values, lm.curvature, lm.hits, data["iteration"], cfg)
    return state, cfg, data.get("trajectory", [])


# --------------------------------------------------------------------------
# certificate and reporting


def certificate(P: HomogeneousPoly, qs):
    """Least-squares ``P ~ sum lambda_i <x|c_i>^d`` over quasi-double points.

    Returns ``(lambdas, residual)`` with the residual measured in Bombieri norm.
    """
    if not qs:
        raise ValueError("need at least one point")
    cusps = [q for q in qs if q.kind == "cusp"]
    if cusps:
        raise CertificateInapplicableError(f"{len(cusps)} quasi-cusp point(s) present")
    A = np.array([orthonormal_coordinates(pow_linear_form(q.c, P.d)) for q in qs])
    p = orthonormal_coordinates(P)
    lam, *_ = np.linalg.lstsq(A.T, p, rcond=1e-12)
    r = A.T @ lam - p
    return lam, float(np.linalg.norm(r))


def report_row(state: MaximizerState) -> dict:
    """Table row: degree, distance, ``||D||^2`` and minimizer counts split by the sign of ``P(c)``."""
    at_min = _active_mask(state.tracked_values, 1e-6)
    vals = state.P.eval_many(state.tracked[at_min])
    neg, pos = int((vals < 0).sum()), int((vals >= 0).sum())
    cneg, cpos = state.continuum_signs
    k_neg = "∞" if cneg else neg
    k_pos = "∞" if cpos else pos
    total = "∞" if (cneg or cpos) else neg + pos
    return {
        "degree": state.P.d,
        "dist": state.dist,
        "D_norm_sq": state.residual,
        "k": total,
        "k_neg": k_neg,
        "k_pos": k_pos,
        "k_text": f"{total} = {k_neg} + {k_pos}",
    }
