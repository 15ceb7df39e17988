"""Dense algebra of real homogeneous polynomials.

A degree-``d`` form in ``n`` variables is stored as its monomial coefficient
vector over the canonical monomial list ``monomials(n, d)`` (lexicographically
decreasing exponent tuples, so ``x1**d`` comes first).  Bombieri weights
``alpha!/d!`` are computed with exact integers and converted once.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Iterable, Mapping, Sequence

import numpy as np
import scipy.linalg

from ._accel import monomial_values
from .errors import ConditioningError, DegreeError, NotOrthogonalError, ShapeError

MAX_DEGREE = 30
PERMANENT_LIMIT = 8


# --------------------------------------------------------------------------
# monomial bookkeeping


def _compositions(n: int, d: int):
    if n == 1:
        yield (d,)
        return
    for first in range(d, -1, -1):
        for rest in _compositions(n - 1, d - first):
            yield (first,) + rest


@lru_cache(maxsize=None)
def monomials(n: int, d: int) -> tuple[tuple[int, ...], ...]:
    """All exponent tuples of length ``n`` summing to ``d``."""
    return tuple(_compositions(n, d))


@lru_cache(maxsize=None)
def monomial_index(n: int, d: int) -> dict[tuple[int, ...], int]:
    return {a: k for k, a in enumerate(monomials(n, d))}


@lru_cache(maxsize=None)
def exponent_array(n: int, d: int) -> np.ndarray:
    arr = np.array(monomials(n, d), dtype=np.int64).reshape(-1, n)
    arr.flags.writeable = False
    return arr


def dimension(n: int, d: int) -> int:
    return math.comb(d + n - 1, n - 1)


def _alpha_factorial(alpha: Sequence[int]) -> int:
    out = 1
    for a in alpha:
        out *= math.factorial(a)
    return out


@lru_cache(maxsize=None)
def exact_weights(n: int, d: int) -> tuple[Fraction, ...]:
    """Exact ``alpha!/d!`` for every monomial, the squared Bombieri norm of ``x**alpha``."""
    df = math.factorial(d)
    return tuple(Fraction(_alpha_factorial(a), df) for a in monomials(n, d))


@lru_cache(maxsize=None)
def bombieri_weights(n: int, d: int) -> np.ndarray:
    w = np.array([float(f) for f in exact_weights(n, d)])
    w.flags.writeable = False
    return w


@lru_cache(maxsize=None)
def multinomials(n: int, d: int) -> np.ndarray:
    """``d!/alpha!`` per monomial, computed exactly."""
    df = math.factorial(d)
    out = np.array([float(df // _alpha_factorial(a)) for a in monomials(n, d)])
    out.flags.writeable = False
    return out


@lru_cache(maxsize=None)
def _mul_table(n: int, a: int, b: int) -> np.ndarray:
    idx = monomial_index(n, a + b)
    ma, mb = monomials(n, a), monomials(n, b)
    table = np.empty((len(ma), len(mb)), dtype=np.int64)
    for i, al in enumerate(ma):
        for j, be in enumerate(mb):
            table[i, j] = idx[tuple(x + y for x, y in zip(al, be))]
    table.flags.writeable = False
    return table


def _dense_mul(u: np.ndarray, a: int, v: np.ndarray, b: int, n: int) -> np.ndarray:
    table = _mul_table(n, a, b)
    return np.bincount(
        table.ravel(), weights=np.outer(u, v).ravel(), minlength=dimension(n, a + b)
    )


@lru_cache(maxsize=None)
def _diff_matrix(n: int, d: int, i: int) -> np.ndarray:
    """Matrix of ``d/dx_i`` from degree ``d`` coefficients to degree ``d-1``."""
    idx = monomial_index(n, d - 1)
    mons = monomials(n, d)
    D = np.zeros((dimension(n, d - 1), len(mons)))
    for k, a in enumerate(mons):
        if a[i]:
            b = list(a)
            b[i] -= 1
            D[idx[tuple(b)], k] = a[i]
    D.flags.writeable = False
    return D


# --------------------------------------------------------------------------
# the polynomial type


def _check_shape(n: int, d: int) -> None:
    if n < 2:
        raise ShapeError(f"ambient dimension must be >= 2, got {n}")
    if d < 1 or d > MAX_DEGREE:
        raise DegreeError(f"degree must be in [1, {MAX_DEGREE}], got {d}")


class HomogeneousPoly:
    """Real homogeneous polynomial of degree ``d`` in ``n`` variables.

    Instances are immutable.  ``coef`` is the dense monomial coefficient
    vector aligned with ``monomials(n, d)``; ``coeffs`` gives the sparse
    ``{alpha: c_alpha}`` view with zeros dropped.
    """

    __array_priority__ = 100

    def __init__(self, n: int, d: int, coef: Iterable[float] | None = None):
        _check_shape(n, d)
        N = dimension(n, d)
        arr = np.zeros(N) if coef is None else np.array(coef, dtype=np.float64)
        if arr.shape != (N,):
            raise ShapeError(f"expected {N} coefficients for (n={n}, d={d}), got {arr.shape}")
        arr.flags.writeable = False
        self.n = n
        self.d = d
        self.coef = arr

    @classmethod
    def from_dict(cls, n: int, d: int, coeffs: Mapping[Sequence[int], float]) -> "HomogeneousPoly":
        _check_shape(n, d)
        idx = monomial_index(n, d)
        arr = np.zeros(len(idx))
        for alpha, c in coeffs.items():
            alpha = tuple(int(a) for a in alpha)
            if len(alpha) != n or sum(alpha) != d or min(alpha) < 0:
                raise ShapeError(f"exponent {alpha} is not a degree-{d} multi-index in {n} variables")
            arr[idx[alpha]] += float(c)
        return cls(n, d, arr)

    @classmethod
    def monomial(cls, alpha: Sequence[int], c: float = 1.0) -> "HomogeneousPoly":
        alpha = tuple(alpha)
        return cls.from_dict(len(alpha), sum(alpha), {alpha: c})

    @property
    def coeffs(self) -> dict[tuple[int, ...], float]:
        return {a: float(c) for a, c in zip(monomials(self.n, self.d), self.coef) if c != 0.0}

    def __repr__(self) -> str:
        terms = " + ".join(f"{c:g}*x^{a}" for a, c in self.coeffs.items()) or "0"
        return f"HomogeneousPoly(n={self.n}, d={self.d}: {terms})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, HomogeneousPoly):
            return NotImplemented
        return self.n == other.n and self.d == other.d and np.array_equal(self.coef, other.coef)

    def __hash__(self) -> int:
        return hash((self.n, self.d, self.coef.tobytes()))

    def _same_space(self, other: "HomogeneousPoly") -> None:
        if (self.n, self.d) != (other.n, other.d):
            raise ShapeError(f"(n, d) mismatch: {(self.n, self.d)} vs {(other.n, other.d)}")

    def __add__(self, other):
        if not isinstance(other, HomogeneousPoly):
            return NotImplemented
        self._same_space(other)
        return HomogeneousPoly(self.n, self.d, self.coef + other.coef)

    def __sub__(self, other):
        if not isinstance(other, HomogeneousPoly):
            return NotImplemented
        self._same_space(other)
        return HomogeneousPoly(self.n, self.d, self.coef - other.coef)

    def __neg__(self):
        return HomogeneousPoly(self.n, self.d, -self.coef)

    def __mul__(self, other):
        if isinstance(other, HomogeneousPoly):
            if self.n != other.n:
                raise ShapeError("cannot multiply polynomials in different dimensions")
            coef = _dense_mul(self.coef, self.d, other.coef, other.d, self.n)
            return HomogeneousPoly(self.n, self.d + other.d, coef)
        if np.isscalar(other):
            return HomogeneousPoly(self.n, self.d, self.coef * float(other))
        return NotImplemented

    def __rmul__(self, other):
        if np.isscalar(other):
            return HomogeneousPoly(self.n, self.d, self.coef * float(other))
        return NotImplemented

    def __truediv__(self, other):
        if np.isscalar(other):
            return HomogeneousPoly(self.n, self.d, self.coef / float(other))
        return NotImplemented

    def __call__(self, x) -> float:
        return evaluate(self, x)

    def is_zero(self) -> bool:
        return not np.any(self.coef)

    # derivative coefficient tensors, built once per polynomial

    @cached_property
    def _grad_coef(self) -> np.ndarray:
        return np.stack([_diff_matrix(self.n, self.d, i) @ self.coef for i in range(self.n)])

    @cached_property
    def _hess_coef(self) -> np.ndarray:
        if self.d < 2:
            raise DegreeError("Hessian requires degree >= 2")
        n, d = self.n, self.d
        g = self._grad_coef
        H = np.empty((n, n, dimension(n, d - 2)))
        for i in range(n):
            for j in range(i, n):
                H[i, j] = H[j, i] = _diff_matrix(n, d - 1, j) @ g[i]
        return H

    @cached_property
    def _third_coef(self) -> np.ndarray:
        if self.d < 3:
            return np.zeros((self.n, self.n, self.n, 1))
        n, d = self.n, self.d
        H = self._hess_coef
        T = np.empty((n, n, n, dimension(n, d - 3)))
        for i, j, k in itertools.combinations_with_replacement(range(n), 3):
            v = _diff_matrix(n, d - 2, k) @ H[i, j]
            for p in set(itertools.permutations((i, j, k))):
                T[p] = v
        return T

    def derivative(self, i: int) -> "HomogeneousPoly":
        if self.d < 2:
            raise DegreeError("derivative of a linear form is a constant")
        return HomogeneousPoly(self.n, self.d - 1, self._grad_coef[i])

    def eval_many(self, X) -> np.ndarray:
        X = _as_points(X, self.n)
        return monomial_values(exponent_array(self.n, self.d), X) @ self.coef

    def jet(self, X, order: int = 2):
        """Values and derivatives up to ``order`` (<= 3) at each row of ``X``.

        Returns a tuple ``(values, grads[, hessians[, thirds]])``.
        """
        X = _as_points(X, self.n)
        n, d = self.n, self.d
        out = [monomial_values(exponent_array(n, d), X) @ self.coef]
        if order >= 1:
            V = monomial_values(exponent_array(n, d - 1), X)
            out.append(V @ self._grad_coef.T)
        if order >= 2:
            if d < 2:
                raise DegreeError("Hessian requires degree >= 2")
            V = monomial_values(exponent_array(n, d - 2), X)
            out.append(np.einsum("mk,ijk->mij", V, self._hess_coef))
        if order >= 3:
            if d < 3:
                out.append(np.zeros((X.shape[0], n, n, n)))
            else:
                V = monomial_values(exponent_array(n, d - 3), X)
                out.append(np.einsum("mk,ijlk->mijl", V, self._third_coef))
        return tuple(out)


def _as_points(X, n: int) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X[None, :]
    if X.ndim != 2 or X.shape[1] != n:
        raise ShapeError(f"points must have {n} coordinates, got shape {X.shape}")
    return X


def _as_vector(x, n: int) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (n,):
        raise ShapeError(f"expected a vector of length {n}, got shape {x.shape}")
    return x


# --------------------------------------------------------------------------
# Bombieri geometry


def bombieri_dot(P: HomogeneousPoly, Q: HomogeneousPoly) -> float:
    P._same_space(Q)
    return float(np.dot(P.coef * bombieri_weights(P.n, P.d), Q.coef))


def bombieri_norm(P: HomogeneousPoly) -> float:
    return math.sqrt(max(bombieri_dot(P, P), 0.0))


def exact_bombieri_norm_sq(n: int, d: int, coeffs: Mapping[Sequence[int], int | Fraction]) -> Fraction:
    """Squared Bombieri norm accumulated in exact rational arithmetic."""
    w = dict(zip(monomials(n, d), exact_weights(n, d)))
    total = Fraction(0)
    for alpha, c in coeffs.items():
        total += Fraction(c) ** 2 * w[tuple(alpha)]
    return total


def orthonormal_coordinates(P: HomogeneousPoly) -> np.ndarray:
    """Coordinates ``a_alpha = c_alpha sqrt(alpha!/d!)`` in the basis ``sqrt(d!/alpha!) x**alpha``."""
    return P.coef * np.sqrt(bombieri_weights(P.n, P.d))


def from_orthonormal_coordinates(n: int, d: int, a) -> HomogeneousPoly:
    return HomogeneousPoly(n, d, np.asarray(a, dtype=np.float64) / np.sqrt(bombieri_weights(n, d)))


def normalized(P: HomogeneousPoly) -> HomogeneousPoly:
    nrm = bombieri_norm(P)
    if nrm == 0.0:
        raise ValueError("cannot normalize the zero polynomial")
    return P / nrm


# --------------------------------------------------------------------------
# pointwise calculus


def normalize(x) -> np.ndarray:
    """Project a nonzero vector onto the unit sphere."""
    x = np.asarray(x, dtype=np.float64)
    r = np.linalg.norm(x)
    if r == 0.0:
        raise ValueError("cannot normalize the zero vector")
    return x / r


def evaluate(P: HomogeneousPoly, x) -> float:
    x = _as_vector(x, P.n)
    return float(P.eval_many(x)[0])


def gradient(P: HomogeneousPoly, x) -> np.ndarray:
    x = _as_vector(x, P.n)
    return P.jet(x, 1)[1][0]


def hessian(P: HomogeneousPoly, x) -> np.ndarray:
    if P.d < 2:
        raise DegreeError("Hessian requires degree >= 2")
    x = _as_vector(x, P.n)
    return P.jet(x, 2)[2][0]


def third_derivative(P: HomogeneousPoly, x) -> np.ndarray:
    x = _as_vector(x, P.n)
    return P.jet(x, 3)[3][0]


def tangential_gradient(P: HomogeneousPoly, x) -> np.ndarray:
    """``grad P(x) - d P(x) x``; the component of the gradient tangent to the sphere at ``x``."""
    x = _as_vector(x, P.n)
    v, g = P.jet(x, 1)
    return g[0] - P.d * v[0] * x


def tangent_projector(x) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    return np.eye(x.size) - np.outer(x, x)


def tangential_hessian(P: HomogeneousPoly, x) -> np.ndarray:
    x = _as_vector(x, P.n)
    Pi = tangent_projector(x)
    H = Pi @ hessian(P, x) @ Pi
    return 0.5 * (H + H.T)


def tangent_basis(x) -> np.ndarray:
    """Orthonormal basis (as columns) of the tangent space at unit ``x``.

    Built from a Householder reflection mapping ``e_n`` to ``x``.
    """
    x = np.asarray(x, dtype=np.float64)
    n = x.size
    e = np.zeros(n)
    e[-1] = 1.0
    s = 1.0 if x[-1] >= 0 else -1.0
    v = s * x + e
    # Reflector H = I - 2 v v^T / v^T v maps s*x to -e_n; its columns are orthonormal.
    H = np.eye(n) - 2.0 * np.outer(v, v) / np.dot(v, v)
    return H[:, : n - 1]


# --------------------------------------------------------------------------
# linear forms


def pow_linear_form(u, d: int) -> HomogeneousPoly:
    """``<x|u>**d`` expanded with multinomial coefficients."""
    u = np.asarray(u, dtype=np.float64)
    n = u.size
    _check_shape(n, d)
    mv = monomial_values(exponent_array(n, d), u[None, :])[0]
    return HomogeneousPoly(n, d, multinomials(n, d) * mv)


def prod_linear_forms(us: Sequence) -> HomogeneousPoly:
    """``prod_i <x|u_i>``."""
    us = [np.asarray(u, dtype=np.float64) for u in us]
    if not us:
        raise ValueError("need at least one linear form")
    n = us[0].size
    if any(u.shape != (n,) for u in us):
        raise ShapeError("all linear forms must have the same length")
    _check_shape(n, len(us))
    coef, deg = us[0].copy(), 1
    for u in us[1:]:
        coef = _dense_mul(coef, deg, u, 1, n)
        deg += 1
    return HomogeneousPoly(n, deg, coef)


def permanent_dot(us: Sequence, vs: Sequence, limit: int = PERMANENT_LIMIT) -> float:
    """``(1/d!) sum_sigma prod_i <u_i|v_sigma(i)>`` by brute force over permutations.

    Cost is ``d!``; intended as an independent check of :func:`bombieri_dot`.
    """
    d = len(us)
    if d != len(vs) or d == 0:
        raise ShapeError("families must be non-empty and of equal length")
    if d > limit:
        raise DegreeError(f"permanent oracle limited to d <= {limit}")
    G = np.array([[float(np.dot(u, v)) for v in vs] for u in us])
    total = 0.0
    for sigma in itertools.permutations(range(d)):
        total += math.prod(G[i, sigma[i]] for i in range(d))
    return total / math.factorial(d)


def veronese_dot(P: HomogeneousPoly, u) -> float:
    return bombieri_dot(P, pow_linear_form(u, P.d))


# --------------------------------------------------------------------------
# orthogonal changes of variables


@dataclass(frozen=True)
class OrthogonalMap:
    matrix: np.ndarray

    def __post_init__(self):
        M = np.array(self.matrix, dtype=np.float64)
        if M.ndim != 2 or M.shape[0] != M.shape[1]:
            raise ShapeError("orthogonal map must be square")
        err = np.max(np.abs(M.T @ M - np.eye(M.shape[0])))
        if err > 1e-12:
            raise NotOrthogonalError(f"M^T M deviates from identity by {err:.3e}")
        M.flags.writeable = False
        object.__setattr__(self, "matrix", M)

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    def __call__(self, x) -> np.ndarray:
        return self.matrix @ np.asarray(x, dtype=np.float64)

    def inverse(self) -> "OrthogonalMap":
        return OrthogonalMap(self.matrix.T)


def random_orthogonal(n: int, rng: np.random.Generator) -> OrthogonalMap:
    """Haar-distributed orthogonal matrix: QR of a Gaussian matrix with sign-fixed diagonal."""
    Z = rng.standard_normal((n, n))
    Q, R = np.linalg.qr(Z)
    return OrthogonalMap(Q * np.sign(np.diag(R)))


def substitute_linear(P: HomogeneousPoly, L: np.ndarray) -> HomogeneousPoly:
    """Coefficients of ``x -> P(L x)`` for any square matrix ``L``."""
    L = np.asarray(L, dtype=np.float64)
    n, d = P.n, P.d
    if L.shape != (n, n):
        raise ShapeError(f"expected a {n}x{n} matrix")
    powers = []
    for i in range(n):
        row = [np.ones(1)]
        for k in range(1, d + 1):
            row.append(_dense_mul(row[-1], k - 1, L[i], 1, n))
        powers.append(row)
    out = np.zeros(dimension(n, d))
    for alpha, c in zip(monomials(n, d), P.coef):
        if c == 0.0:
            continue
        acc, deg = np.ones(1), 0
        for i, a in enumerate(alpha):
            if a:
                acc = _dense_mul(acc, deg, powers[i][a], a, n)
                deg += a
        out += c * acc
    return HomogeneousPoly(n, d, out)


def compose_orthogonal(P: HomogeneousPoly, h: OrthogonalMap | np.ndarray) -> HomogeneousPoly:
    """``P o h``, i.e. the polynomial ``x -> P(h(x))``."""
    if not isinstance(h, OrthogonalMap):
        h = OrthogonalMap(h)
    if h.n != P.n:
        raise ShapeError("orthogonal map dimension does not match polynomial")
    return substitute_linear(P, h.matrix)


# --------------------------------------------------------------------------
# basis matrices for the general distance formula


@dataclass(frozen=True)
class BasisMatrices:
    C: np.ndarray
    B: np.ndarray
    A: np.ndarray
    M: np.ndarray


def basis_matrices(n: int, d: int, x, cond_limit: float = 1e12) -> BasisMatrices:
    """Values ``C`` and partial derivatives ``B`` of the Bombieri-orthonormal
    monomial basis ``sqrt(d!/alpha!) x**alpha`` at ``x``, with ``A = B B^T``
    and ``M = A^{-1}`` (via Cholesky)."""
    _check_shape(n, d)
    x = _as_vector(x, n)
    if not np.any(x):
        raise ValueError("basis matrices are undefined at x = 0")
    scale = np.sqrt(multinomials(n, d))
    C = scale * monomial_values(exponent_array(n, d), x[None, :])[0]
    V = monomial_values(exponent_array(n, d - 1), x[None, :])[0]
    B = np.stack([(V @ _diff_matrix(n, d, i)) * scale for i in range(n)])
    A = B @ B.T
    A = 0.5 * (A + A.T)
    ev = np.linalg.eigvalsh(A)
    if ev[0] <= 0 or ev[-1] / ev[0] > cond_limit:
        raise ConditioningError(f"A(x) condition number {ev[-1] / max(ev[0], 1e-300):.3e} exceeds {cond_limit:g}")
    cho = scipy.linalg.cho_factor(A)
    M = scipy.linalg.cho_solve(cho, np.eye(n))
    return BasisMatrices(C=C, B=B, A=A, M=0.5 * (M + M.T))
