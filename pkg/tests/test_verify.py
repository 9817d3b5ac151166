import numpy as np
import pytest

from stagdg.verify import (RadialVortexParams, WomersleyParams,
                           blasius_reference, convergence_rates,
                           detect_reattachment, l2_errors,
                           potential_cylinder_exact,
                           potential_cylinder_velocity, radial_vortex_exact,
                           radial_vortex_velocity, strouhal, womersley_exact)


def test_radial_vortex_is_steady_euler_solution():
    """u_phi = c/r with p = -c^2/(2 r^2)*... : the radial momentum balance
    dp/dr = u_phi^2 / r must hold."""
    par = RadialVortexParams()
    r = np.linspace(1.2, 4.5, 200)
    u, p = radial_vortex_exact(r, par)
    dpdr = np.gradient(p, r)
    # np.gradient is only first-order at the record ends
    assert np.allclose(dpdr[2:-2], (u ** 2 / r)[2:-2], rtol=1e-3)


def test_radial_vortex_velocity_components():
    par = RadialVortexParams()
    x, y = 1.5, 2.0
    r = np.hypot(x, y)
    u, v = radial_vortex_velocity(np.array(x), np.array(y), par)
    # azimuthal: v.r = 0 and |v| = |u_phi(r)|
    assert abs(u * x + v * y) < 1e-12
    assert abs(np.hypot(u, v) - abs(radial_vortex_exact(r, par)[0])) < 1e-12


def test_womersley_satisfies_momentum_equation():
    """The profile solves the axisymmetric momentum balance
    du/dt = force + nu (u_rr + u_r/r) with force = p~/rho cos(omega t)."""
    par = WomersleyParams()
    r = np.linspace(0.02, par.D / 2 - 0.02, 41)
    t = 0.37
    h, ht = 2e-5, 1e-6
    u_t = (womersley_exact(r, t + ht, par) - womersley_exact(r, t - ht, par)) / (2 * ht)
    up = womersley_exact(r + h, t, par)
    u0 = womersley_exact(r, t, par)
    um = womersley_exact(r - h, t, par)
    u_rr = (up - 2 * u0 + um) / h ** 2
    u_r = (up - um) / (2 * h)
    force = par.p_tilde / par.rho * np.cos(par.omega * t)
    resid = u_t - force - par.nu * (u_rr + u_r / r)
    scale = np.abs(u_t).max()
    assert np.abs(resid).max() < 1e-3 * scale


def test_womersley_no_slip_at_walls():
    par = WomersleyParams()
    for t in (0.0, 0.4, 1.1):
        u = womersley_exact(np.array([-par.D / 2, par.D / 2]), t, par)
        assert np.abs(u).max() < 1e-10


def test_blasius_reference_properties():
    xi = np.linspace(0.0, 8.0, 81)
    f, fp, fpp = blasius_reference(xi)
    assert abs(f[0]) < 1e-10 and abs(fp[0]) < 1e-10
    # wall curvature in the xi = y*sqrt(u/(2 nu x)) scaling: sqrt(2)*0.332057
    assert abs(fpp[0] - 0.469600) < 1e-4
    assert abs(fp[-1] - 1.0) < 1e-6
    assert (np.diff(fp) >= -1e-12).all()          # monotone profile


def test_potential_cylinder_divergence_and_bc():
    u_bar, r_c = 0.01, 1.0
    rng = np.random.default_rng(11)
    x = rng.uniform(1.5, 5.0, 200) * rng.choice([-1, 1], 200)
    y = rng.uniform(1.5, 5.0, 200) * rng.choice([-1, 1], 200)
    h = 1e-5
    ux = (potential_cylinder_velocity(x + h, y, u_bar, r_c)[0]
          - potential_cylinder_velocity(x - h, y, u_bar, r_c)[0]) / (2 * h)
    vy = (potential_cylinder_velocity(x, y + h, u_bar, r_c)[1]
          - potential_cylinder_velocity(x, y - h, u_bar, r_c)[1]) / (2 * h)
    assert np.abs(ux + vy).max() < 1e-8 * u_bar
    # no penetration on the cylinder
    phi = np.linspace(0, 2 * np.pi, 50)
    ur, _, _ = potential_cylinder_exact(r_c, phi, u_bar, r_c)
    assert np.abs(ur).max() < 1e-12
    # far field approaches the freestream
    u, v = potential_cylinder_velocity(np.array(300.0), np.array(1.0), u_bar, r_c)
    assert abs(u - u_bar) < 1e-4 * u_bar and abs(v) < 1e-4 * u_bar


def test_potential_cylinder_bernoulli():
    u_bar, r_c = 0.01, 1.0
    r, phi = 1.7, 0.9
    ur, uphi, p = potential_cylinder_exact(r, phi, u_bar, r_c)
    # p + |v|^2/2 = p_inf + u_bar^2/2 (kinematic pressure, p_inf = 0)
    assert abs(p + 0.5 * (ur ** 2 + uphi ** 2) - 0.5 * u_bar ** 2) < 1e-15


def test_convergence_rates():
    errs = [1.0, 0.25, 0.0625]
    rates = convergence_rates(errs)
    assert np.allclose(rates, [2.0, 2.0])


def test_detect_reattachment_interpolates_zero_crossing():
    x = np.linspace(0.0, 10.0, 101)
    u = (x - 6.35) * 0.1        # negative (recirculating) until x = 6.35
    assert abs(detect_reattachment(x, u) - 6.35) < 1e-6
    assert detect_reattachment(x, np.ones_like(x)) is None


def test_strouhal_recovers_sine_frequency():
    t = np.linspace(0.0, 120.0, 4000)
    f0 = 0.055
    sig = 0.3 * np.sin(2 * np.pi * f0 * t) + 0.01
    st = strouhal(t, sig, r=1.0, u_inf=0.5)
    # St = 2 r f / u; None would mean "no dominant peak"
    assert st is not None
    assert abs(st - 2 * 1.0 * f0 / 0.5) < 0.005


def test_strouhal_flags_aperiodic_signal():
    rng = np.random.default_rng(3)
    t = np.linspace(0.0, 120.0, 4000)
    st = strouhal(t, rng.standard_normal(t.size) * 1e-12, r=1.0, u_inf=0.5)
    assert st is None
