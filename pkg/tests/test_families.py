import math

import pytest

from discdist.algebra import bombieri_norm
from discdist.families import (
    PD_NORM_SQ,
    revolution_coefficients,
    revolution_distance_exact,
    revolution_min_gap,
    revolution_norm_sq_exact,
    revolution_poly,
    revolution_zero_angles,
)


def test_low_degree_coefficients():
    assert revolution_coefficients(2) == {(2, 0, 0): 1, (0, 2, 0): -1, (0, 0, 2): -1}
    assert revolution_coefficients(3) == {(3, 0, 0): 1, (1, 2, 0): -3, (1, 0, 2): -3}


@pytest.mark.parametrize("d", range(2, 7))
def test_exact_norms(d):
    assert revolution_norm_sq_exact(d) == PD_NORM_SQ[d]
    assert bombieri_norm(revolution_poly(d)) ** 2 == pytest.approx(float(PD_NORM_SQ[d]), rel=1e-14)


def test_closed_form_distances():
    expected = [1 / math.sqrt(3), 1 / math.sqrt(7), math.sqrt(3 / 47), math.sqrt(3 / 103), math.sqrt(5 / 371)]
    for d, e in zip(range(2, 7), expected):
        assert revolution_distance_exact(d) == pytest.approx(e, rel=1e-15)


def test_zero_circles_of_degree_four():
    ang = revolution_zero_angles(4)
    assert ang == pytest.approx([math.pi / 8, 3 * math.pi / 8, 5 * math.pi / 8, 7 * math.pi / 8], abs=1e-12)
    assert revolution_min_gap(4) == pytest.approx(math.pi / 4, abs=1e-12)
    assert revolution_min_gap(1) == math.inf or len(revolution_zero_angles(2)) == 2
