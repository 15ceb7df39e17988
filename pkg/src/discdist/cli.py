"""Command-line entry point.

Exit codes: 0 ok, 2 unreadable or malformed input, 3 polynomial on the
discriminant, 4 optimizer stall.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import logging
import math
import os
import sys
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import _accel
from .algebra import HomogeneousPoly, bombieri_dot, bombieri_norm, normalized, pow_linear_form
from .bounds import (
    band_gradient_margins,
    bounds_report,
    empirical_cap_check,
    trace_gradient_curve,
)
from .classify import classification_record, find_quasi_singular
from .distance import FORMAT_VERSION, SearchConfig, delta, distance_bombieri, distance_general_at
from .errors import CertificateInapplicableError, DegenerateError, DomainError, ParseError
from .families import PD_NORM_SQ, revolution_coefficients, revolution_norm_sq_exact, revolution_poly
from .maximizer import (
    OptimizeConfig,
    certificate,
    initial_state,
    load_checkpoint,
    report_row,
    run,
    save_checkpoint,
)
from .polyio import read_poly
from .univariate import (
    closed_form_distance,
    closed_form_distance_normalized,
    gram_powers,
    make_T,
    numeric_distance,
    trig_identity_errors,
    valid_identity_pairs,
)

log = logging.getLogger("discdist")

EXIT_OK, EXIT_PARSE, EXIT_DEGENERATE, EXIT_STALL = 0, 2, 3, 4
DEGENERATE_RTOL = 1e-9


def _sha256(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


class Run:
    """Collects the manifest for one command invocation."""

    def __init__(self, args: argparse.Namespace):
        self.args = args
        self.started = _now()
        self.inputs: dict[str, str] = {}
        self.outputs: dict[str, str] = {}
        self.config: dict = {}

    def read(self, path: str) -> HomogeneousPoly:
        data = Path(path).read_bytes()
        self.inputs[path] = _sha256(data)
        return read_poly(path)

    def wrote(self, path) -> None:
        self.outputs[str(path)] = _sha256(Path(path).read_bytes())

    def manifest(self, payload: dict) -> dict:
        body = json.dumps(payload, sort_keys=True).encode()
        return {
            "command": self.args.command,
            "argv": [a for a in self.args.argv],
            "config": self.config,
            "seed": self.args.seed,
            "backend": f"binary64/{_accel.backend_name()}",
            "threads": self.args.threads,
            "inputs": self.inputs,
            "outputs": {**self.outputs, "payload": _sha256(body)},
            "timestamps": {"started": self.started, "finished": _now()},
        }

    def emit(self, payload: dict) -> None:
        doc = {"format": FORMAT_VERSION, **payload, "manifest": self.manifest(payload)}
        text = json.dumps(doc, indent=1, ensure_ascii=False)
        if self.args.out:
            Path(self.args.out).write_text(text + "\n")
        else:
            print(text)


def _search_config(args) -> SearchConfig:
    return SearchConfig(restarts=args.restarts, seed=args.seed)


def _check_degenerate(P: HomogeneousPoly, dist: float) -> bool:
    return dist <= DEGENERATE_RTOL * bombieri_norm(P)


# --------------------------------------------------------------------------
# commands


def cmd_dist(args, run_: Run) -> int:
    P = run_.read(args.polyfile)
    cfg = _search_config(args)
    run_.config = cfg.to_dict()
    rep = distance_bombieri(P, cfg)
    out = rep.to_json()
    out.pop("format")
    out["norm"] = bombieri_norm(P)
    if args.general_check:
        rows = []
        for c in rep.minimizers:
            g = distance_general_at(P, c)
            s = math.sqrt(max(delta(P, c), 0.0))
            rows.append({"general": g, "delta_sqrt": s, "rel_diff": abs(g - s) / max(s, 1e-300)})
        out["general_check"] = rows
    degenerate = _check_degenerate(P, rep.dist)
    out["degenerate"] = degenerate
    run_.emit(out)
    return EXIT_DEGENERATE if degenerate else EXIT_OK


def cmd_classify(args, run_: Run) -> int:
    P = run_.read(args.polyfile)
    cfg = _search_config(args)
    run_.config = cfg.to_dict()
    rep = distance_bombieri(P, cfg)
    if _check_degenerate(P, rep.dist):
        run_.emit({"dist": rep.dist, "degenerate": True, "points": []})
        return EXIT_DEGENERATE
    qs = find_quasi_singular(P, cfg, report=rep)
    run_.emit(
        {
            "dist": rep.dist,
            "continuum": rep.possibly_continuum,
            "points": [classification_record(P, q) for q in qs],
        }
    )
    return EXIT_OK


def cmd_optimize(args, run_: Run) -> int:
    if args.resume:
        state, cfg, traj = load_checkpoint(args.resume)
        run_.inputs[args.resume] = _sha256(Path(args.resume).read_bytes())
        cfg = OptimizeConfig.from_dict(
            {**cfg.to_dict(), "max_iters": args.max_iters, "residual_tol": args.residual_tol}
        )
        P0 = state.P
    else:
        P0 = run_.read(args.polyfile)
        cfg = OptimizeConfig(
            max_iters=args.max_iters,
            residual_tol=args.residual_tol,
            checkpoint_every=args.checkpoint_every,
            refresh_every=math.gcd(args.checkpoint_every, 25),
            search=_search_config(args),
        )
        state, traj = None, None
    run_.config = cfg.to_dict()
    try:
        res = run(P0, cfg, checkpoint=args.checkpoint, resume_state=state, trajectory=traj)
    except DegenerateError as exc:
        run_.emit({"error": str(exc), "degenerate": True})
        return EXIT_DEGENERATE
    if args.checkpoint:
        # off-cadence states are saved only on stall: resuming them would not replay the same run
        if res.stalled or res.state.iteration % cfg.refresh_every == 0:
            save_checkpoint(args.checkpoint, res.state, cfg, res.trajectory)
        if Path(args.checkpoint).exists():
            run_.wrote(args.checkpoint)
    payload = {
        "trajectory": res.trajectory,
        "row": report_row(res.state),
        "converged": res.converged,
        "stalled": res.stalled,
    }
    try:
        lam, resid = certificate(res.state.P, res.state.qs)
        payload["certificate"] = {"lambdas": [float(v) for v in lam], "residual": resid}
    except CertificateInapplicableError as exc:
        payload["certificate"] = {"inapplicable": str(exc)}
    run_.emit(payload)
    return EXIT_STALL if res.stalled else EXIT_OK


def cmd_univariate(args, run_: Run) -> int:
    if args.identities is not None:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["d", "r", "identity", "max_error"])
        for r, d in valid_identity_pairs(args.identities):
            errs = trig_identity_errors(r, d, args.grid)
            for name in ("cos", "sin"):
                w.writerow([d, r, name, repr(errs[name])])
        text = buf.getvalue()
        if args.out:
            Path(args.out).write_text(text)
        else:
            sys.stdout.write(text)
        return EXIT_OK
    cfg = _search_config(args)
    run_.config = cfg.to_dict()
    if args.trd is not None:
        r, d = args.trd
        T = make_T(r, d)
        num = numeric_distance(r, d, cfg)
        cf = closed_form_distance(r, d)
        run_.emit(
            {
                "r": r,
                "d": d,
                "norm_sq": bombieri_norm(T) ** 2,
                "closed_form": cf,
                "closed_form_normalized": closed_form_distance_normalized(r, d),
                "numeric": num,
                "error": abs(num - cf),
            }
        )
        return EXIT_OK
    d = args.gram
    rng = np.random.default_rng([args.seed, 5])
    thetas = np.sort(rng.uniform(0.0, math.pi, d + 1))
    gp = gram_powers(thetas, d)
    forms = [pow_linear_form([math.cos(t), math.sin(t)], d) for t in thetas]
    G2 = np.array([[bombieri_dot(a, b) for b in forms] for a in forms])
    run_.emit(
        {
            "d": d,
            "thetas": thetas.tolist(),
            "detV": gp.detV,
            "det_direct": float(np.linalg.det(gp.V)),
            "factor_error": gp.factor_error,
            "gram_vs_bombieri": float(np.max(np.abs(gp.G - G2))),
        }
    )
    return EXIT_OK


def _zero_on_sphere(P: HomogeneousPoly, rng: np.random.Generator):
    """A point with ``P = 0`` found by bisection along a great circle."""
    X = rng.standard_normal((256, P.n))
    X /= np.linalg.norm(X, axis=1, keepdims=True)
    v = P.eval_many(X)
    pos, neg = np.flatnonzero(v > 0), np.flatnonzero(v < 0)
    if not len(pos) or not len(neg):
        return None
    a, b = X[pos[0]], X[neg[0]]
    if abs(a @ b) > 1 - 1e-12:
        return None
    for _ in range(100):
        m = a + b
        m /= np.linalg.norm(m)
        if P(m) > 0:
            a = m
        else:
            b = m
    return a


def bounds_checks(P: HomogeneousPoly, cfg: SearchConfig, samples: int = 10_000) -> dict:
    """Bounds plus their empirical checks, as a JSON-ready dict."""
    rep = distance_bombieri(P, cfg)
    if _check_degenerate(P, rep.dist):
        raise DegenerateError(f"dist = {rep.dist:.3e}")
    qs = find_quasi_singular(P, cfg, report=rep)
    m = rep.dist
    b = bounds_report(P, m)
    checks = []
    for q in qs:
        if q.kind != "double":
            continue
        ok = empirical_cap_check(P, q.c, m, samples=samples, seed=cfg.seed)
        checks.append({"name": "cap", "point": q.c.tolist(), "pass": ok})
    margins = band_gradient_margins(P, m, samples=samples, seed=cfg.seed)
    checks.append({"name": "band_gradient", "min_margin": float(margins.min()), "pass": bool(margins.min() > -1e-9)})
    z = _zero_on_sphere(P, np.random.default_rng([cfg.seed, 6]))
    if z is not None:
        tr = trace_gradient_curve(P, z, m)
        checks.append(
            {
                "name": "band_trace",
                "start": z.tolist(),
                "arc_length": tr.arc_length,
                "a": tr.a,
                "b": tr.b,
                "bound": tr.bound,
                "stagnated": tr.stagnated,
                "pass": bool(tr.arc_length <= 1.01 * tr.bound),
            }
        )
    out = b.to_json(P.d)
    out["dist"] = m
    out["checks"] = checks
    if not any(q.kind == "double" for q in qs):
        out["notes"] = "no quasi-double minimizer: cap check not applicable"
    return out


def cmd_bounds(args, run_: Run) -> int:
    P = run_.read(args.polyfile)
    cfg = _search_config(args)
    run_.config = cfg.to_dict()
    try:
        out = bounds_checks(P, cfg, args.samples)
    except DegenerateError as exc:
        run_.emit({"error": str(exc), "degenerate": True})
        return EXIT_DEGENERATE
    run_.emit(out)
    return EXIT_OK


def table_rows(dmax: int, cfg: SearchConfig) -> list[dict]:
    rows = []
    ocfg = OptimizeConfig(search=cfg)
    for d in range(2, dmax + 1):
        ns = revolution_norm_sq_exact(d)
        closed = math.sqrt(ns.denominator / ns.numerator)
        P = normalized(revolution_poly(d))
        st = initial_state(P, ocfg)
        row = report_row(st)
        rows.append(
            {
                "d": d,
                "coefficients": {" ".join(map(str, k)): v for k, v in sorted(revolution_coefficients(d).items(), reverse=True)},
                "norm_sq": str(ns),
                "norm_sq_expected": str(PD_NORM_SQ.get(d, ns)),
                "dist_closed": closed,
                "dist": st.dist,
                "error": abs(st.dist - closed),
                "D_norm_sq": st.residual,
                "k": row["k_text"],
            }
        )
    return rows


def cmd_table(args, run_: Run) -> int:
    cfg = _search_config(args)
    run_.config = {**cfg.to_dict(), "dmax": args.dmax}
    run_.emit({"rows": table_rows(args.dmax, cfg)})
    return EXIT_OK


# --------------------------------------------------------------------------
# parser


def _default_seed() -> int:
    env = os.environ.get("DISCDIST_SEED")
    return int(env) if env else 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="discdist", description="Distance to the real discriminant.")
    p.add_argument("--seed", type=int, default=None, help="RNG seed (default: $DISCDIST_SEED or 0)")
    p.add_argument("--threads", type=int, default=None, help="cap on JIT worker threads")
    p.add_argument("--restarts", type=int, default=64)
    p.add_argument("--out", default=None, help="write the report here instead of stdout")
    p.add_argument("-v", "--verbose", action="count", default=0)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("dist", help="distance and minimizers")
    s.add_argument("polyfile")
    s.add_argument("--general-check", action="store_true")

    s = sub.add_parser("classify", help="quasi-double / quasi-cusp classification")
    s.add_argument("polyfile")

    s = sub.add_parser("optimize", help="ascend the distance")
    s.add_argument("polyfile", nargs="?")
    s.add_argument("--max-iters", type=int, default=500)
    s.add_argument("--residual-tol", type=float, default=1e-12)
    s.add_argument("--checkpoint", default=None)
    s.add_argument("--checkpoint-every", type=int, default=25)
    s.add_argument("--resume", default=None)

    s = sub.add_parser("univariate", help="binary forms")
    g = s.add_mutually_exclusive_group(required=True)
    g.add_argument("--trd", type=int, nargs=2, metavar=("R", "D"))
    g.add_argument("--identities", type=int, metavar="DMAX")
    g.add_argument("--gram", type=int, metavar="D")
    s.add_argument("--grid", type=int, default=1024)

    s = sub.add_parser("bounds", help="cap, separation and band bounds with checks")
    s.add_argument("polyfile")
    s.add_argument("--samples", type=int, default=10_000)

    s = sub.add_parser("table", help="closed-form rows for the surfaces of revolution")
    s.add_argument("--dmax", type=int, default=6)
    return p


COMMANDS = {
    "dist": cmd_dist,
    "classify": cmd_classify,
    "optimize": cmd_optimize,
    "univariate": cmd_univariate,
    "bounds": cmd_bounds,
    "table": cmd_table,
}


def _set_threads(n: int | None) -> None:
    if n and _accel.HAVE_NUMBA:
        import numba

        numba.set_num_threads(max(1, min(n, numba.config.NUMBA_NUM_THREADS)))


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    args.argv = argv
    if args.seed is None:
        args.seed = _default_seed()
    logging.basicConfig(
        level=logging.WARNING - 10 * min(args.verbose, 2),
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    if args.command == "optimize" and not (args.polyfile or args.resume):
        parser.error("optimize needs a polynomial file or --resume")
    _set_threads(args.threads)
    run_ = Run(args)
    try:
        return COMMANDS[args.command](args, run_)
    except (ParseError, FileNotFoundError, IsADirectoryError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except DegenerateError as exc:
        print(f"degenerate: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE


if __name__ == "__main__":
    sys.exit(main())
