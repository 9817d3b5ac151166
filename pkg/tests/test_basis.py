import numpy as np
import pytest

from stagdg.basis import (BasisSet, n_phi, n_psi, quad_node_lattice,
                          quadrature, segment_rule, square_rule,
                          tri_node_lattice, triangle_rule)


@pytest.mark.parametrize("p", [0, 1, 2, 3])
def test_space_dimensions(p):
    assert n_phi(p) == (p + 1) * (p + 2) // 2
    assert n_psi(p) == (p + 1) ** 2
    b = BasisSet(p)
    assert b.n_phi == n_phi(p)
    assert b.n_psi == n_psi(p)


@pytest.mark.parametrize("p", [1, 2, 3])
def test_nodal_property(p):
    b = BasisSet(p)
    tn = tri_node_lattice(p)
    assert np.allclose(b.tri_eval(tn), np.eye(b.n_phi), atol=1e-12)
    qn = quad_node_lattice(p)
    assert np.allclose(b.quad_eval(qn), np.eye(b.n_psi), atol=1e-12)


@pytest.mark.parametrize("p", [0, 1, 2, 3])
def test_partition_of_unity(p):
    b = BasisSet(p)
    rng = np.random.default_rng(3)
    pts = rng.uniform(0, 1, (40, 2))
    tpts = pts.copy()
    tpts[:, 1] *= 1 - tpts[:, 0]          # into the reference triangle
    assert np.allclose(b.tri_eval(tpts).sum(-1), 1.0, atol=1e-12)
    assert np.allclose(b.quad_eval(pts).sum(-1), 1.0, atol=1e-12)
    # gradients of the constant must vanish
    assert np.allclose(b.tri_grad(tpts).sum(-2), 0.0, atol=1e-10)
    assert np.allclose(b.quad_grad(pts).sum(-2), 0.0, atol=1e-10)


@pytest.mark.parametrize("p", [2, 3])
def test_gradients_match_finite_differences(p):
    b = BasisSet(p)
    rng = np.random.default_rng(7)
    pts = rng.uniform(0.1, 0.45, (10, 2))
    h = 1e-6
    for ev, gr in ((b.tri_eval, b.tri_grad), (b.quad_eval, b.quad_grad)):
        g = gr(pts)
        for d in range(2):
            dp = pts.copy()
            dp[:, d] += h
            dm = pts.copy()
            dm[:, d] -= h
            fd = (ev(dp) - ev(dm)) / (2 * h)
            assert np.allclose(g[..., d], fd, atol=1e-6)


def test_segment_rule_exactness():
    for deg in range(1, 12):
        r = segment_rule(deg)
        for k in range(deg + 1):
            exact = 1.0 / (k + 1)
            got = (r.weights * r.points[:, 0] ** k).sum()
            assert abs(got - exact) < 1e-13


def test_square_rule_exactness():
    r = square_rule(7)
    for i in range(8):
        for j in range(8):
            exact = 1.0 / ((i + 1) * (j + 1))
            got = (r.weights * r.points[:, 0] ** i * r.points[:, 1] ** j).sum()
            assert abs(got - exact) < 1e-13


def test_triangle_rule_exactness():
    from math import factorial
    r = triangle_rule(6)
    for i in range(7):
        for j in range(7 - i):
            # integral of x^i y^j over the unit reference triangle
            exact = factorial(i) * factorial(j) / factorial(i + j + 2)
            got = (r.weights * r.points[:, 0] ** i * r.points[:, 1] ** j).sum()
            assert abs(got - exact) < 1e-13


def test_quadrature_dispatch():
    assert quadrature("segment", 3).domain == "segment"
    assert quadrature("square", 3).domain == "square"
    assert quadrature("triangle", 3).domain == "triangle"
    with pytest.raises(ValueError):
        quadrature("hexagon", 3)
