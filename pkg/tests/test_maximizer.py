import math

import numpy as np
import pytest

from discdist.algebra import (
    HomogeneousPoly,
    bombieri_dot,
    bombieri_norm,
    from_orthonormal_coordinates,
    normalized,
    orthonormal_coordinates,
    pow_linear_form,
)
from discdist.classify import classify, find_quasi_singular
from discdist.distance import distance_bombieri
from discdist.errors import CertificateInapplicableError
from discdist.maximizer import (
    OptimizeConfig,
    ascent_direction,
    certificate,
    initial_state,
    load_checkpoint,
    report_row,
    run,
    save_checkpoint,
    step,
)
from discdist.univariate import make_C, make_S, make_T

QUADRIC = normalized(HomogeneousPoly.from_dict(3, 2, {(2, 0, 0): 1, (0, 2, 0): 1, (0, 0, 2): -1}))


def perturbed_c3(seed=7, eps=0.05):
    C = normalized(make_C(3))
    rng = np.random.default_rng(seed)
    Q = HomogeneousPoly(2, 3, rng.standard_normal(4))
    Q = normalized(Q - bombieri_dot(Q, C) * C)
    return normalized(C + eps * Q)


def test_quadric_residual_vanishes():
    qs = find_quasi_singular(QUADRIC)
    D, residual, _ = ascent_direction(QUADRIC, qs)
    assert residual < 1e-20


def test_projection_properties():
    st = initial_state(perturbed_c3())
    p1 = st.P + st.D
    for R in st.radii:
        assert abs(bombieri_dot(st.D, R)) < 1e-12
    # P + D lies in span{R_i}
    A = np.array([orthonormal_coordinates(R) for R in st.radii]).T
    c, *_ = np.linalg.lstsq(A, orthonormal_coordinates(p1), rcond=None)
    assert np.linalg.norm(A @ c - orthonormal_coordinates(p1)) < 1e-9
    assert st.residual == pytest.approx(bombieri_norm(st.D) ** 2, rel=1e-12)


@pytest.mark.parametrize("d", [3, 4, 5])
def test_C_d_is_a_fixed_point(d):
    st = initial_state(make_C(d))
    assert st.residual < 1e-20 and st.gap < 1e-20
    res = run(make_C(d))
    assert res.converged and res.state.iteration == 0
    assert abs(step(st, 1.0).dist - st.dist) < 1e-12


def test_first_order_growth():
    P = perturbed_c3()
    st = initial_state(P)
    assert len(st.qs) == 1
    p, dcoord = orthonormal_coordinates(st.P), orthonormal_coordinates(st.D)
    for t in (1e-3, 1e-4):
        x = p + t * dcoord
        Pt = from_orthonormal_coordinates(2, 3, x / np.linalg.norm(x))
        dt = distance_bombieri(Pt).dist
        rate = (dt**2 / st.dist**2 - 1) / (2 * t * st.residual)
        assert rate == pytest.approx(1.0, abs=20 * t)


def test_run_is_monotone_and_reaches_half():
    res = run(perturbed_c3(seed=3))
    dists = [row["dist"] for row in res.trajectory]
    assert all(b > a for a, b in zip(dists, dists[1:]))
    assert res.converged
    assert res.state.dist == pytest.approx(0.5, abs=1e-9)
    assert abs(bombieri_norm(res.state.P) - 1) < 1e-12


def test_step_refuses_nonpositive_t():
    st = initial_state(perturbed_c3())
    with pytest.raises(ValueError):
        step(st, 0.0)


@pytest.mark.parametrize("d", [3, 4, 6])
def test_certificate_of_C_d(d):
    C = make_C(d)
    qs = [classify(C, [math.cos(k * math.pi / d), math.sin(k * math.pi / d)]) for k in range(d)]
    lam, resid = certificate(C, qs)
    expected = [(-1) ** k * 2 ** (d - 1) / d for k in range(d)]
    assert lam == pytest.approx(expected, abs=1e-10)
    assert resid <= 1e-10


def test_certificate_of_power():
    u = np.array([0.6, 0.8])
    P = pow_linear_form(u, 4)
    lam, resid = certificate(P, [classify(P, u)])
    assert lam == pytest.approx([1.0]) and resid < 1e-12


def test_certificate_rejects_cusps():
    T = make_T(1, 5)
    with pytest.raises(CertificateInapplicableError):
        certificate(T, find_quasi_singular(T))


def test_certificate_matches_projection_residual():
    st = initial_state(perturbed_c3())
    _, resid = certificate(st.P, st.qs)
    assert resid**2 == pytest.approx(st.residual, rel=1e-9, abs=1e-12)


def test_checkpoint_roundtrip(tmp_path):
    cfg = OptimizeConfig(max_iters=5, refresh_every=5, checkpoint_every=5)
    res = run(perturbed_c3(), cfg)
    f = tmp_path / "ck.json"
    save_checkpoint(f, res.state, cfg, res.trajectory)
    st, cfg2, traj = load_checkpoint(f)
    assert st.dist == res.state.dist
    assert st.residual == res.state.residual
    assert cfg2 == cfg and traj == res.trajectory


def test_resume_reproduces_continuation(tmp_path):
    cfg = OptimizeConfig(max_iters=10, refresh_every=5, checkpoint_every=5)
    f = tmp_path / "ck.json"
    full = run(perturbed_c3(seed=3), cfg, checkpoint=f)
    st, cfg2, traj = load_checkpoint(f)
    assert st.iteration % 5 == 0
    resumed = run(st.P, cfg2, resume_state=st, trajectory=traj)
    assert resumed.trajectory == full.trajectory


def test_config_cadence_validation():
    with pytest.raises(ValueError):
        OptimizeConfig(refresh_every=25, checkpoint_every=10)


def test_report_rows():
    row = report_row(initial_state(make_C(4)))
    assert row["k_text"] == "4 = 2 + 2"
    assert row["dist"] == pytest.approx(1 / math.sqrt(8))
    row = report_row(initial_state(QUADRIC))
    assert row["k_text"] == "∞ = 1 + ∞"
    assert row["D_norm_sq"] < 1e-20
    assert row["dist"] == pytest.approx(1 / math.sqrt(3))
