import math

import numpy as np
import pytest

from discdist.algebra import HomogeneousPoly, bombieri_dot, bombieri_norm, pow_linear_form
from discdist.classify import find_quasi_singular
from discdist.errors import DegenerateError, DomainError, ShapeError
from discdist.univariate import (
    S_coefficients,
    T_coefficients,
    closed_form_distance,
    closed_form_distance_normalized,
    gram_powers,
    local_max_probe,
    make_C,
    make_S,
    make_T,
    numeric_distance,
    trig_identity_error,
    trig_sample,
    valid_identity_pairs,
)


def test_trig_sample_basic():
    s = trig_sample(HomogeneousPoly.from_dict(2, 2, {(2, 0): 1}), 0.0)
    assert s.value == 1.0 and s.derivative == 0.0
    with pytest.raises(ShapeError):
        trig_sample(HomogeneousPoly(3, 2), 0.0)


@pytest.mark.parametrize("r,d", [(1, 5), (2, 4), (3, 5), (4, 4), (2, 6)])
def test_T_is_cosine(r, d):
    T = make_T(r, d)
    for th in np.linspace(0, 2 * np.pi, 256, endpoint=False):
        s = trig_sample(T, th)
        assert s.value == pytest.approx(math.cos(r * th), abs=1e-12)
        assert s.derivative == pytest.approx(-r * math.sin(r * th), abs=1e-11)


def test_derivative_matches_finite_difference():
    T = make_T(3, 5)
    h = 1e-6
    for th in (0.1, 1.3, 2.9):
        fd = (trig_sample(T, th + h).value - trig_sample(T, th - h).value) / (2 * h)
        assert trig_sample(T, th).derivative == pytest.approx(fd, abs=1e-6)


@pytest.mark.parametrize("d", [2, 3, 5, 7])
def test_second_derivative_of_C(d):
    assert trig_sample(make_C(d), 0.0).second_derivative == pytest.approx(-d * d, rel=1e-12)


def test_small_cases():
    assert T_coefficients(2, 2) == {(2, 0): 1, (0, 2): -1}
    assert T_coefficients(3, 3) == {(3, 0): 1, (1, 2): -3}
    assert S_coefficients(1) == {(0, 1): 1}
    assert S_coefficients(2) == {(1, 1): 2}
    with pytest.raises(DomainError):
        make_T(2, 5)
    with pytest.raises(DomainError):
        make_T(0, 2)


@pytest.mark.parametrize("d", range(1, 11))
def test_C_S_norms_and_orthogonality(d):
    C, S = make_C(d), make_S(d)
    assert bombieri_norm(C) ** 2 == pytest.approx(2 ** (d - 1), rel=1e-12)
    assert bombieri_norm(S) ** 2 == pytest.approx(2 ** (d - 1), rel=1e-12)
    assert abs(bombieri_dot(C, S)) < 1e-12


def test_closed_form_values():
    assert closed_form_distance(5, 5) == 1.0
    assert closed_form_distance(1, 5) == pytest.approx(1 / math.sqrt(5))
    assert closed_form_distance(2, 6) == pytest.approx(2 / math.sqrt(6))
    assert closed_form_distance_normalized(3, 3) == pytest.approx(0.5)


@pytest.mark.parametrize("r,d", [(1, 5), (2, 6), (2, 4), (3, 3)])
def test_numeric_matches_closed_form(r, d):
    assert numeric_distance(r, d) == pytest.approx(closed_form_distance(r, d), abs=1e-8)


def test_cusp_versus_double_follows_sign_of_r2_minus_d():
    assert {q.kind for q in find_quasi_singular(make_T(1, 5))} == {"cusp"}
    assert {q.kind for q in find_quasi_singular(make_T(3, 5))} == {"double"}


def test_identity_examples():
    assert trig_identity_error(2, 2) <= 1e-15
    assert trig_identity_error(7, 7, 1000) <= 1e-12
    assert trig_identity_error(4, 8) <= 1e-12
    with pytest.raises(DomainError):
        trig_identity_error(1, 5)


def test_identity_domain_listing():
    pairs = valid_identity_pairs(6)
    assert (2, 4) in pairs and (1, 5) not in pairs and (2, 6) not in pairs and (4, 6) in pairs


def test_gram_quarter_turn():
    gp = gram_powers([0.0, math.pi / 2], 1)
    assert np.allclose(gp.G, np.eye(2), atol=1e-15)
    assert gp.detV == pytest.approx(-1.0)


@pytest.mark.parametrize("d", range(1, 7))
def test_gram_factorization_and_determinant(rng, d):
    th = np.sort(rng.uniform(0, np.pi, d + 1))
    gp = gram_powers(th, d)
    assert gp.factor_error <= 1e-10
    direct = np.linalg.det(gp.V)
    assert gp.detV == pytest.approx(direct, rel=1e-10)
    forms = [pow_linear_form([math.cos(t), math.sin(t)], d) for t in th]
    G2 = np.array([[bombieri_dot(a, b) for b in forms] for a in forms])
    assert np.allclose(gp.G, G2, atol=1e-12)
    assert np.linalg.matrix_rank(G2) == d + 1


def test_gram_rejects_coincident_angles():
    with pytest.raises(DegenerateError):
        gram_powers([0.0, math.pi], 1)
    with pytest.raises(ShapeError):
        gram_powers([0.0, 1.0, 2.0], 1)


def test_local_max_probe():
    base, pert = local_max_probe(4, samples=10, seed=1)
    assert np.all(pert < base - 1e-9)
