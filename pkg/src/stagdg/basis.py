"""Nodal polynomial bases and quadrature rules on the reference elements.

Reference triangle: T_std = {(xi, ga) : xi >= 0, ga >= 0, ga <= 1 - xi}.
Reference square:   R_std = [0, 1]^2.

Triangle bases are total-degree-p Lagrange polynomials on the equispaced
lattice, square bases are tensor products of 1D equispaced Lagrange
polynomials.  Both satisfy the Kronecker property at their nodes.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import roots_jacobi


def tri_node_lattice(p: int) -> np.ndarray:
    """Equispaced nodes on T_std, shape (N_phi, 2).  p=0 uses the centroid."""
    if p == 0:
        return np.array([[1.0 / 3.0, 1.0 / 3.0]])
    pts = [(i / p, j / p) for j in range(p + 1) for i in range(p + 1 - j)]
    return np.array(pts)


def quad_node_lattice(p: int) -> np.ndarray:
    """Tensor equispaced nodes on R_std, shape (N_psi, 2).  p=0 uses the center."""
    if p == 0:
        return np.array([[0.5, 0.5]])
    t = np.linspace(0.0, 1.0, p + 1)
    xi, ga = np.meshgrid(t, t, indexing="xy")
    return np.column_stack([xi.ravel(), ga.ravel()])


def _tri_monomials(p: int) -> list[tuple[int, int]]:
    return [(a, b) for b in range(p + 1) for a in range(p + 1 - b)]


def n_phi(p: int) -> int:
    return (p + 1) * (p + 2) // 2


def n_psi(p: int) -> int:
    return (p + 1) ** 2


@dataclass
class BasisSet:
    """Nodal bases of degree p on the reference triangle and square."""

    p: int
    tri_nodes: np.ndarray = field(init=False)
    quad_nodes: np.ndarray = field(init=False)
    _tri_coeff: np.ndarray = field(init=False, repr=False)
    _mono: list = field(init=False, repr=False)

    def __post_init__(self):
        if self.p < 0:
            raise ValueError(f"polynomial degree must be non-negative, got {self.p}")
        self.tri_nodes = tri_node_lattice(self.p)
        self.quad_nodes = quad_node_lattice(self.p)
        self._mono = _tri_monomials(self.p)
        V = np.array([[xn ** a * yn ** b for (a, b) in self._mono]
                      for xn, yn in self.tri_nodes])
        self._tri_coeff = np.linalg.inv(V)  # column k: monomial coeffs of phi_k

    @property
    def n_phi(self) -> int:
        return len(self.tri_nodes)

    @property
    def n_psi(self) -> int:
        return len(self.quad_nodes)

    # -- triangle basis -------------------------------------------------
    def tri_eval(self, pts: np.ndarray) -> np.ndarray:
        """phi_k at pts (..., 2) -> (..., N_phi)."""
        pts = np.asarray(pts, dtype=float)
        x, y = pts[..., 0], pts[..., 1]
        mono = np.stack([x ** a * y ** b for (a, b) in self._mono], axis=-1)
        return mono @ self._tri_coeff

    def tri_grad(self, pts: np.ndarray) -> np.ndarray:
        """grad phi_k at pts (..., 2) -> (..., N_phi, 2)."""
        pts = np.asarray(pts, dtype=float)
        x, y = pts[..., 0], pts[..., 1]
        dx = np.stack([a * x ** max(a - 1, 0) * y ** b for (a, b) in self._mono], axis=-1)
        dy = np.stack([b * x ** a * y ** max(b - 1, 0) for (a, b) in self._mono], axis=-1)
        return np.stack([dx @ self._tri_coeff, dy @ self._tri_coeff], axis=-1)

    # -- 1D Lagrange helpers --------------------------------------------
    def lag1d(self, t: np.ndarray, deriv: bool = False) -> np.ndarray:
        """1D equispaced Lagrange values (or derivatives) at t, (..., p+1)."""
        p = self.p
        if p == 0:
            out = np.ones(t.shape + (1,)) if not deriv else np.zeros(t.shape + (1,))
            return out
        nodes = np.linspace(0.0, 1.0, p + 1)
        t = np.asarray(t, dtype=float)
        out = np.empty(t.shape + (p + 1,))
        for k in range(p + 1):
            others = np.delete(nodes, k)
            denom = np.prod(nodes[k] - others)
            if not deriv:
                out[..., k] = np.prod(t[..., None] - others, axis=-1) / denom
            else:
                s = np.zeros_like(t)
                for m in range(p):
                    rest = np.delete(others, m)
                    s = s + np.prod(t[..., None] - rest, axis=-1)
                out[..., k] = s / denom
        return out

    # -- square basis ---------------------------------------------------
    def quad_eval(self, pts: np.ndarray) -> np.ndarray:
        """psi_k at pts (..., 2) -> (..., N_psi); k ordered x-fast."""
        pts = np.asarray(pts, dtype=float)
        lx = self.lag1d(pts[..., 0])
        ly = self.lag1d(pts[..., 1])
        return (ly[..., :, None] * lx[..., None, :]).reshape(pts.shape[:-1] + (self.n_psi,))

    def quad_grad(self, pts: np.ndarray) -> np.ndarray:
        """grad psi_k at pts (..., 2) -> (..., N_psi, 2)."""
        pts = np.asarray(pts, dtype=float)
        lx = self.lag1d(pts[..., 0])
        ly = self.lag1d(pts[..., 1])
        dlx = self.lag1d(pts[..., 0], deriv=True)
        dly = self.lag1d(pts[..., 1], deriv=True)
        gx = (ly[..., :, None] * dlx[..., None, :]).reshape(pts.shape[:-1] + (self.n_psi,))
        gy = (dly[..., :, None] * lx[..., None, :]).reshape(pts.shape[:-1] + (self.n_psi,))
        return np.stack([gx, gy], axis=-1)


@dataclass(frozen=True)
class QuadratureRule:
    """Positive quadrature rule with stated polynomial exactness degree."""

    domain: str  # "triangle" | "square" | "segment"
    points: np.ndarray
    weights: np.ndarray
    degree: int


def _gauss01(n: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (x + 1.0), 0.5 * w


def segment_rule(degree: int) -> QuadratureRule:
    """Gauss-Legendre on [0, 1] exact up to `degree`."""
    if degree < 0:
        raise ValueError("exactness degree must be >= 0")
    n = degree // 2 + 1
    x, w = _gauss01(n)
    return QuadratureRule("segment", x[:, None], w, 2 * n - 1)


def square_rule(degree: int) -> QuadratureRule:
    """Tensor Gauss rule on [0, 1]^2 exact for degree `degree` per direction."""
    if degree < 0:
        raise ValueError("exactness degree must be >= 0")
    n = degree // 2 + 1
    x, w = _gauss01(n)
    X, Y = np.meshgrid(x, x, indexing="xy")
    W = np.outer(w, w)
    return QuadratureRule("square", np.column_stack([X.ravel(), Y.ravel()]),
                          W.ravel(), 2 * n - 1)


def triangle_rule(degree: int) -> QuadratureRule:
    """Duffy-type rule on T_std, exact for total degree `degree`.

    Uses Gauss-Legendre in the collapsed direction and Gauss-Jacobi (1,0)
    in the other, which absorbs the (1-v) Jacobian exactly.
    """
    if degree < 0:
        raise ValueError("exactness degree must be >= 0")
    n = degree // 2 + 1
    u, wu = _gauss01(n)
    vj, wj = roots_jacobi(n, 1.0, 0.0)  # weight (1-x) on [-1,1]
    v = 0.5 * (vj + 1.0)
    wv = wj / 4.0  # maps weight (1-x)dx on [-1,1] to (1-v)dv on [0,1]
    U, V = np.meshgrid(u, v, indexing="xy")
    W = np.outer(wv, wu)
    xi = U * (1.0 - V)
    ga = V
    return QuadratureRule("triangle", np.column_stack([xi.ravel(), ga.ravel()]),
                          W.ravel(), 2 * n - 1)


def quadrature(domain: str, degree: int) -> QuadratureRule:
    if domain == "triangle":
        return triangle_rule(degree)
    if domain == "square":
        return square_rule(degree)
    if domain == "segment":
        return segment_rule(degree)
    raise ValueError(f"unknown quadrature domain {domain!r}")


def make_basis(p: int) -> BasisSet:
    return BasisSet(p)
