import numpy as np
import pytest

from discdist import sphere


def quadratic(A):
    def fun(X):
        val = np.einsum("mi,ij,mj->m", X, A, X)
        return val, 2 * X @ A, np.broadcast_to(2 * A, (X.shape[0],) + A.shape).copy()

    return fun


def test_minimize_finds_smallest_eigenvector():
    A = np.diag([3.0, 1.0, 2.0])
    fun = quadratic(A)
    rng = np.random.default_rng(0)
    X0 = sphere.normalize_rows(rng.standard_normal((8, 3)))
    res = sphere.minimize(fun, lambda Y: fun(Y)[0], X0, grad_tol=1e-12, curvature_floor=1e-8)
    assert res.converged.all()
    assert np.allclose(res.value, 1.0, atol=1e-12)
    assert np.allclose(np.abs(res.X[:, 1]), 1.0, atol=1e-10)


def test_find_roots_reaches_saddles():
    A = np.diag([3.0, 1.0, 2.0])
    fun = quadratic(A)
    X0 = sphere.normalize_rows(np.array([[0.05, 0.02, 1.0]]))
    res = sphere.find_roots(fun, X0, grad_tol=1e-12, curvature_floor=1e-8)
    assert res.converged.all()
    assert abs(res.value[0] - 2.0) < 1e-12


def test_tangent_bases_are_orthonormal():
    rng = np.random.default_rng(1)
    X = sphere.normalize_rows(rng.standard_normal((5, 4)))
    U = sphere.tangent_bases(X)
    for k in range(5):
        assert np.allclose(U[k].T @ U[k], np.eye(3), atol=1e-14)
        assert np.allclose(X[k] @ U[k], 0, atol=1e-14)


def test_canonical_sign_and_cluster():
    X = np.array([[-1.0, 0.0], [1e-14, -1.0], [1.0, 1e-9]])
    C = sphere.canonical_sign(X)
    assert C[0, 0] == 1.0 and C[1, 1] == 1.0
    groups = sphere.cluster(C, 1e-6)
    assert groups == [[0, 2], [1]]
