"""Closed-form test families.

``P_d(x, y, z) = T_d(x, y^2 + z^2)`` with ``T_d(x, t) = sum_k (-1)^k binom(d, 2k) t^k x^(d-2k)``
is the surface of revolution of the binary form ``cos(d theta)``: its zero set
on the sphere is a family of nested circles around the ``x`` axis, and all its
critical values are ``+-1``.  Hence ``dist(P_d/||P_d||) = 1/||P_d||``.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
from scipy.optimize import brentq

from .algebra import HomogeneousPoly, exact_bombieri_norm_sq

# Squared Bombieri norms of P_2..P_6.
PD_NORM_SQ = {2: Fraction(3), 3: Fraction(7), 4: Fraction(47, 3), 5: Fraction(103, 3), 6: Fraction(371, 5)}


def revolution_coefficients(d: int) -> dict[tuple[int, int, int], int]:
    """Exact integer coefficients of ``P_d``."""
    out: dict[tuple[int, int, int], int] = {}
    for k in range(d // 2 + 1):
        ck = (-1) ** k * math.comb(d, 2 * k)
        for j in range(k + 1):
            key = (d - 2 * k, 2 * j, 2 * (k - j))
            out[key] = out.get(key, 0) + ck * math.comb(k, j)
    return {k: v for k, v in out.items() if v}


def revolution_poly(d: int) -> HomogeneousPoly:
    return HomogeneousPoly.from_dict(3, d, revolution_coefficients(d))


def revolution_norm_sq_exact(d: int) -> Fraction:
    return exact_bombieri_norm_sq(3, d, revolution_coefficients(d))


def revolution_distance_exact(d: int) -> float:
    """``dist(P_d/||P_d||) = 1/||P_d||``, from the exact rational norm."""
    ns = revolution_norm_sq_exact(d)
    return math.sqrt(ns.denominator / ns.numerator)


def revolution_zero_angles(d: int) -> np.ndarray:
    """Polar angles (from the ``x`` axis) in ``(0, pi)`` of the zero circles of ``P_d``.

    Found numerically as sign changes of ``phi -> P_d(cos phi, sin phi, 0)``.
    """
    P = revolution_poly(d)

    def f(phi):
        return P([math.cos(phi), math.sin(phi), 0.0])

    grid = np.linspace(1e-9, math.pi - 1e-9, 4000)
    vals = np.array([f(p) for p in grid])
    roots = []
    for a, b, fa, fb in zip(grid[:-1], grid[1:], vals[:-1], vals[1:]):
        if fa == 0.0:
            roots.append(a)
        elif fa * fb < 0:
            roots.append(brentq(f, a, b, xtol=1e-15))
    return np.array(roots)


def revolution_min_gap(d: int) -> float:
    """Smallest arc distance between two distinct zero circles of ``P_d``."""
    ang = revolution_zero_angles(d)
    if len(ang) < 2:
        return math.inf
    return float(np.min(np.diff(ang)))
