"""Reference solutions and error metrics for the benchmark suite.

Pure functions only: closed-form fields (annulus vortex, oscillating channel
flow, potential flow past a cylinder), a shooting solution of the Blasius
boundary-layer ODE, L2 error norms against the discrete solution, observed
convergence orders, reattachment-point detection and Strouhal numbers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from .basis import triangle_rule, square_rule
from .operators import ElementOperators, _inv2, tri_basis_at


# ---------------------------------------------------------------------------
# closed-form fields
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RadialVortexParams:
    c1: float = 2.0
    c2: float = 0.0
    r_inner: float = 1.0
    r_outer: float = 5.0


def radial_vortex_exact(r, params: RadialVortexParams = RadialVortexParams()):
    """Steady annulus vortex u_phi = c1/r with its centripetal pressure.

    The pressure integrates dp/dr = u_phi^2/r = c1^2/r^3 giving
    p = -c1^2/(2 r^2) + c2 (the constant fixes p at r -> infinity).
    """
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise ValueError("radial vortex is singular at r = 0")
    u_phi = params.c1 / r
    p = -0.5 * params.c1 ** 2 / r ** 2 + params.c2
    return u_phi, p


def radial_vortex_velocity(x, y, params: RadialVortexParams = RadialVortexParams()):
    """Cartesian (u, v) of the annulus vortex at points x, y."""
    r = np.hypot(x, y)
    u_phi, _ = radial_vortex_exact(r, params)
    return -u_phi * y / r, u_phi * x / r


@dataclass(frozen=True)
class WomersleyParams:
    p_tilde: float = 1000.0
    rho: float = 1000.0
    omega: float = 2 * np.pi
    nu: float = 8.94e-4
    D: float = 0.4
    L: float = 1.5


def _j0_series(z):
    """Bessel J0 for complex argument via the power series
    sum_k (-z^2/4)^k / (k!)^2, truncated when a term drops below 1e-16."""
    z = np.asarray(z, dtype=complex)
    if np.any(np.abs(z) > 25.0):
        raise ValueError("J0 power series unreliable for |z| > 25")
    term = np.ones_like(z)
    total = term.copy()
    for k in range(1, 200):
        term = term * (-z * z / 4.0) / (k * k)
        total += term
        if np.abs(term).max() < 1e-16:
            return total
    raise ValueError("J0 power series did not converge")


def womersley_exact(y, t, params: WomersleyParams = WomersleyParams()):
    """Axial velocity of pulsatile flow driven by (p_tilde/rho) e^{i omega t}.

    zeta = 2y/D in [-1, 1]; alpha = (D/2) sqrt(omega/nu).  Returns the real
    part of the classical profile; zero exactly at the walls.
    """
    y = np.asarray(y, dtype=float)
    zeta = 2.0 * y / params.D
    if np.any(np.abs(zeta) > 1.0 + 1e-12):
        raise ValueError("|2y/D| must be <= 1")
    alpha = 0.5 * params.D * np.sqrt(params.omega / params.nu)
    i32 = np.exp(1j * 3 * np.pi / 4)          # i^(3/2)
    u = (params.p_tilde / params.rho / (1j * params.omega)
         * (1.0 - _j0_series(alpha * zeta * i32) / _j0_series(alpha * i32))
         * np.exp(1j * params.omega * t))
    return u.real


def blasius_reference(xi_grid):
    """Solve f''' + f f'' = 0, f(0)=f'(0)=0, f'(inf)=1 by shooting on f''(0).

    Returns (f, f', f'') on the ascending grid (xi_max >= 8 required for the
    far-field condition to be meaningful).
    """
    xi_grid = np.asarray(xi_grid, dtype=float)
    if np.any(np.diff(xi_grid) <= 0):
        raise ValueError("xi grid must be ascending")
    xi_max = max(xi_grid[-1], 10.0)

    def rhs(_, y):
        return [y[1], y[2], -y[0] * y[2]]

    def miss(fpp0):
        sol = solve_ivp(rhs, (0.0, xi_max), [0.0, 0.0, fpp0],
                        rtol=1e-12, atol=1e-12, dense_output=False)
        return sol.y[1, -1] - 1.0

    fpp0 = brentq(miss, 0.2, 0.8, xtol=1e-12)
    sol = solve_ivp(rhs, (0.0, xi_max), [0.0, 0.0, fpp0],
                    rtol=1e-12, atol=1e-12, dense_output=True)
    f, fp, fpp = sol.sol(xi_grid)
    return f, fp, fpp


def potential_cylinder_exact(r, phi, u_bar: float, r_c: float):
    """Potential flow past a cylinder of radius r_c: (u_r, u_phi, p)."""
    r = np.asarray(r, dtype=float)
    if np.any(r < r_c * (1.0 - 1e-12)):
        raise ValueError("points must lie outside the cylinder")
    k = (r_c / r) ** 2
    u_r = u_bar * (1.0 - k) * np.cos(phi)
    u_phi = -u_bar * (1.0 + k) * np.sin(phi)
    p = 0.5 * u_bar ** 2 * (2.0 * k * np.cos(2.0 * phi) - k ** 2)
    return u_r, u_phi, p


def potential_cylinder_velocity(x, y, u_bar: float, r_c: float):
    """Cartesian velocity of the potential cylinder flow."""
    r = np.hypot(x, y)
    phi = np.arctan2(y, x)
    u_r, u_phi, _ = potential_cylinder_exact(r, phi, u_bar, r_c)
    c, s = np.cos(phi), np.sin(phi)
    return u_r * c - u_phi * s, u_r * s + u_phi * c


# ---------------------------------------------------------------------------
# error norms and rates
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ErrorNorms:
    pressure: float
    velocity: float


def l2_errors(ops: ElementOperators, P: np.ndarray, V: np.ndarray,
              exact_velocity, exact_pressure=None) -> ErrorNorms:
    """L2(Omega) errors of pressure (primal mesh) and velocity (dual mesh).

    exact_velocity(x, y) -> (u, v); exact_pressure(x, y) -> p (or None to
    skip, returning 0 for the pressure norm).
    """
    geo, basis = ops.geo, ops.basis
    p = ops.p
    rule_t = triangle_rule(2 * p + 2)
    rule_q = square_rule(2 * p + 2)

    # pressure over primal triangles
    ep2 = 0.0
    if exact_pressure is not None:
        J = geo.tri_maps.jacobian(rule_t.points)
        _, det = _inv2(J)
        w = rule_t.weights[None, :] * det
        x = geo.tri_maps.forward(rule_t.points)
        ph = np.einsum("qk,ak->aq", basis.tri_eval(rule_t.points), P)
        ep2 = float((w * (ph - exact_pressure(x[..., 0], x[..., 1])) ** 2).sum())

    # velocity over dual elements
    ev2 = 0.0
    if len(geo.int_edges):
        _, det = _inv2(geo.quad_maps.jacobian(rule_q.points))
        w = rule_q.weights[None, :] * det
        x = geo.quad_maps.forward(rule_q.points)
        vh = np.einsum("qk,akd->aqd", basis.quad_eval(rule_q.points),
                       V[geo.int_edges])
        ue, ve = exact_velocity(x[..., 0], x[..., 1])
        ev2 += float((w * ((vh[..., 0] - ue) ** 2 + (vh[..., 1] - ve) ** 2)).sum())
    if len(geo.bnd_edges):
        _, det = _inv2(geo.bnd_maps.jacobian(rule_t.points))
        w = rule_t.weights[None, :] * det
        x = geo.bnd_maps.forward(rule_t.points)
        vh = np.einsum("qk,akd->aqd", basis.tri_eval(rule_t.points),
                       V[geo.bnd_edges, :basis.n_phi])
        ue, ve = exact_velocity(x[..., 0], x[..., 1])
        ev2 += float((w * ((vh[..., 0] - ue) ** 2 + (vh[..., 1] - ve) ** 2)).sum())
    return ErrorNorms(pressure=np.sqrt(ep2), velocity=np.sqrt(ev2))


def convergence_rates(errors) -> np.ndarray:
    """Observed orders log2(e_k / e_{k+1}) for meshes refined by factor 2."""
    e = np.asarray(errors, dtype=float)
    if np.any(e == 0.0):
        raise ValueError("zero error: order undefined")
    return np.log2(e[:-1] / e[1:])


# ---------------------------------------------------------------------------
# flow diagnostics
# ---------------------------------------------------------------------------

def detect_reattachment(x_samples, shear_samples):
    """Reattachment abscissa: sign change of wall shear from - to + downstream.

    x_samples ascending, shear_samples the wall-tangential velocity
    derivative normal to the wall.  Returns the bisected zero crossing of
    the first recirculation bubble, or None when the flow never separates.
    """
    x = np.asarray(x_samples, dtype=float)
    s = np.asarray(shear_samples, dtype=float)
    neg = np.flatnonzero(s < 0.0)
    if len(neg) == 0:
        return None
    k = neg[-1]
    if k + 1 >= len(s):
        return None                       # still separated at the last sample
    x0, x1 = x[k], x[k + 1]
    s0, s1 = s[k], s[k + 1]
    return x0 + (x1 - x0) * (-s0) / (s1 - s0)


def strouhal(times, signal, r: float, u_inf: float,
             min_periods: float = 5.0, peak_ratio: float = 5.0):
    """Strouhal number 2 r f / u_inf from the dominant spectral peak.

    Returns None (aperiodic) when no peak dominates the mean-removed
    spectrum by the given ratio or fewer than min_periods cycles fit in the
    record.
    """
    t = np.asarray(times, dtype=float)
    sig = np.asarray(signal, dtype=float) - np.mean(signal)
    if np.allclose(sig, 0.0):
        return None
    dt = t[1] - t[0]
    n = len(t)
    amp = np.abs(np.fft.rfft(sig * np.hanning(n)))
    freqs = np.fft.rfftfreq(n, dt)
    k = np.argmax(amp[1:]) + 1
    f = freqs[k]
    if f * (t[-1] - t[0]) < min_periods:
        return None
    others = np.delete(amp[1:], k - 1)
    if len(others) and amp[k] < peak_ratio * np.median(others) :
        return None
    # refine with a parabolic fit through the peak bin
    if 1 <= k < len(amp) - 1:
        a, b, c = amp[k - 1], amp[k], amp[k + 1]
        denom = a - 2 * b + c
        if denom != 0.0:
            f += 0.5 * (a - c) / denom * (freqs[1] - freqs[0])
    return 2.0 * r * f / u_inf
