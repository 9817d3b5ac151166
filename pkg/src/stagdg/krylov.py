"""Matrix-free Krylov solvers used by the pressure and viscous subsystems.

Conjugate gradients for the symmetric positive (semi-)definite pressure
system, restarted GMRES for the nonsymmetric implicit viscous blocks.  Both
take a callable operator and report iteration counts and final residuals so
callers can decide what a failed solve means.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np


class SolverError(RuntimeError):
    pass


@dataclass
class SolveReport:
    converged: bool
    iterations: int
    residual: float
    breakdown: str | None = None
    history: list = field(default_factory=list)


def conjugate_gradient(apply_A: Callable[[np.ndarray], np.ndarray],
                       b: np.ndarray,
                       x0: np.ndarray | None = None,
                       tol: float = 1.0e-12,
                       maxiter: int | None = None,
                       project: Callable[[np.ndarray], np.ndarray] | None = None,
                       ) -> tuple[np.ndarray, SolveReport]:
    """CG on A x = b with relative residual stop |r| <= tol * |b|.

    ``project`` (optional) maps vectors onto the orthogonal complement of a
    known nullspace (e.g. subtracting the mean for the all-walls pressure
    problem); it is applied to b, x0 and every operator output.  Detects
    loss of positive definiteness (non-positive curvature p.Ap) and reports
    it instead of silently diverging.
    """
    b = np.asarray(b, dtype=float).ravel()
    n = b.size
    if maxiter is None:
        maxiter = 10 * n + 100
    if project is not None:
        b = project(b)
    bnorm = np.linalg.norm(b)
    if bnorm == 0.0:
        return np.zeros(n), SolveReport(True, 0, 0.0)

    x = np.zeros(n) if x0 is None else np.array(x0, dtype=float).ravel()
    if project is not None:
        x = project(x)
    Ax = apply_A(x)
    if project is not None:
        Ax = project(Ax)
    r = b - Ax
    rnorm = np.linalg.norm(r)
    history = [rnorm]
    if rnorm <= tol * bnorm:
        return x, SolveReport(True, 0, rnorm / bnorm, history=history)

    p = r.copy()
    rs = rnorm * rnorm
    for it in range(1, maxiter + 1):
        Ap = apply_A(p)
        if project is not None:
            Ap = project(Ap)
        curv = float(p @ Ap)
        if curv <= 0.0:
            return x, SolveReport(False, it, rnorm / bnorm,
                                  breakdown="non-positive curvature", history=history)
        alpha = rs / curv
        x += alpha * p
        r -= alpha * Ap
        rs_new = float(r @ r)
        rnorm = np.sqrt(rs_new)
        history.append(rnorm)
        if rnorm <= tol * bnorm:
            return x, SolveReport(True, it, rnorm / bnorm, history=history)
        p = r + (rs_new / rs) * p
        rs = rs_new
    return x, SolveReport(False, maxiter, rnorm / bnorm, history=history)


def gmres(apply_A: Callable[[np.ndarray], np.ndarray],
          b: np.ndarray,
          x0: np.ndarray | None = None,
          tol: float = 1.0e-12,
          restart: int = 30,
          maxiter: int | None = None) -> tuple[np.ndarray, SolveReport]:
    """Restarted GMRES(m) with Givens-rotation least squares.

    ``maxiter`` counts total Arnoldi steps.  Stagnation across a restart
    cycle (relative residual reduction < 1e-3 of the cycle start) is
    reported via the breakdown field.
    """
    b = np.asarray(b, dtype=float).ravel()
    n = b.size
    m = min(restart, n)
    if maxiter is None:
        maxiter = 20 * n + 100
    bnorm = np.linalg.norm(b)
    if bnorm == 0.0:
        return np.zeros(n), SolveReport(True, 0, 0.0)

    x = np.zeros(n) if x0 is None else np.array(x0, dtype=float).ravel()
    total = 0
    history = []
    while True:
        r = b - apply_A(x)
        beta = np.linalg.norm(r)
        history.append(beta)
        if beta <= tol * bnorm:
            return x, SolveReport(True, total, beta / bnorm, history=history)
        if total >= maxiter:
            return x, SolveReport(False, total, beta / bnorm, history=history)
        cycle_start = beta

        V = np.zeros((m + 1, n))
        H = np.zeros((m + 1, m))
        cs = np.zeros(m)
        sn = np.zeros(m)
        g = np.zeros(m + 1)
        V[0] = r / beta
        g[0] = beta
        k = 0
        while k < m and total < maxiter:
            w = apply_A(V[k])
            # modified Gram-Schmidt
            for i in range(k + 1):
                H[i, k] = V[i] @ w
                w -= H[i, k] * V[i]
            H[k + 1, k] = np.linalg.norm(w)
            if H[k + 1, k] > 1e-14 * bnorm:
                V[k + 1] = w / H[k + 1, k]
            # apply accumulated rotations, then a new one
            for i in range(k):
                t = cs[i] * H[i, k] + sn[i] * H[i + 1, k]
                H[i + 1, k] = -sn[i] * H[i, k] + cs[i] * H[i + 1, k]
                H[i, k] = t
            rho = np.hypot(H[k, k], H[k + 1, k])
            cs[k], sn[k] = H[k, k] / rho, H[k + 1, k] / rho
            H[k, k] = rho
            H[k + 1, k] = 0.0
            g[k + 1] = -sn[k] * g[k]
            g[k] = cs[k] * g[k]
            total += 1
            k += 1
            history.append(abs(g[k]))
            if abs(g[k]) <= tol * bnorm:
                break
        if k:
            y = np.linalg.solve(np.triu(H[:k, :k]), g[:k])
            x = x + y @ V[:k]
        res = abs(g[k]) if k else beta
        if res <= tol * bnorm:
            r = b - apply_A(x)
            return x, SolveReport(True, total, np.linalg.norm(r) / bnorm,
                                  history=history)
        if res > 1.0e-3 * cycle_start and k == m:
            # keep going only if we still make progress
            if res > (1.0 - 1.0e-12) * cycle_start:
                return x, SolveReport(False, total, res / bnorm,
                                      breakdown="stagnation", history=history)


def zero_mean_projector(weights: np.ndarray) -> Callable[[np.ndarray], np.ndarray]:
    """Projector removing the weighted-constant nullspace component."""
    w = np.asarray(weights, dtype=float).ravel()
    w = w / np.linalg.norm(w)

    def project(v: np.ndarray) -> np.ndarray:
        return v - (w @ v) * w

    return project
