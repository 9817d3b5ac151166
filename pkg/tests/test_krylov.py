import numpy as np
import pytest

from stagdg.krylov import conjugate_gradient, gmres, zero_mean_projector


@pytest.fixture
def spd_system(rng):
    n = 40
    B = rng.standard_normal((n, n))
    A = B @ B.T + n * np.eye(n)
    x = rng.standard_normal(n)
    return A, x, A @ x


def test_cg_solves_spd(spd_system):
    A, x, b = spd_system
    sol, rep = conjugate_gradient(lambda v: A @ v, b, tol=1e-12)
    assert np.allclose(sol, x, atol=1e-8)
    assert rep.converged
    assert rep.iterations <= len(b)


def test_gmres_solves_spd(spd_system):
    A, x, b = spd_system
    sol, rep = gmres(lambda v: A @ v, b, tol=1e-12)
    assert np.allclose(sol, x, atol=1e-8)
    assert rep.converged


def test_gmres_solves_nonsymmetric(rng):
    n = 30
    A = np.eye(n) * 5 + rng.standard_normal((n, n)) * 0.3
    x = rng.standard_normal(n)
    sol, rep = gmres(lambda v: A @ v, A @ x, tol=1e-12)
    assert np.allclose(sol, x, atol=1e-8)


def test_cg_initial_guess(spd_system):
    A, x, b = spd_system
    sol, rep = conjugate_gradient(lambda v: A @ v, b, x0=x, tol=1e-12)
    assert rep.iterations <= 1
    assert np.allclose(sol, x, atol=1e-10)


def test_cg_singular_with_projection(rng):
    # SPD on the zero-mean subspace, singular overall (constant nullspace)
    n = 25
    G = rng.standard_normal((n - 1, n))
    G -= G.mean(axis=1, keepdims=True)   # rows orthogonal to constants
    A = G.T @ G + np.outer(np.zeros(n), np.zeros(n))
    proj = zero_mean_projector(np.ones(n))
    xs = proj(rng.standard_normal(n))
    b = A @ xs
    sol, rep = conjugate_gradient(lambda v: A @ v, b, tol=1e-10, project=proj)
    assert np.allclose(proj(sol), sol, atol=1e-10)
    assert np.allclose(A @ sol, b, atol=1e-6)


def test_cg_reports_failure():
    # indefinite matrix: CG must report the breakdown, not return silently
    A = np.diag([1.0, -1.0, 2.0, -2.0])
    _, rep = conjugate_gradient(lambda v: A @ v, np.ones(4), tol=1e-14,
                                maxiter=10)
    assert not rep.converged
    assert rep.breakdown


def test_zero_mean_projector_weights():
    w = np.array([1.0, 2.0, 3.0])
    proj = zero_mean_projector(w)
    v = proj(np.array([5.0, 1.0, 2.0]))
    assert abs(np.dot(w, v)) < 1e-12
