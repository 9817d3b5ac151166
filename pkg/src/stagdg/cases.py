"""Preconfigured benchmark cases.

Each ``run_*`` function builds its mesh, boundary conditions and stepper,
integrates in time (to a fixed horizon or to a steady state) and returns a
:class:`CaseResult` whose ``metrics`` dictionary holds the quantities the
verification suite checks.  All cases run at desk scale (seconds to a few
minutes); the vortex-street case is the one deliberately slow outlier.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import mesh as meshmod
from .bc import (BoundaryCondition, ResolvedBC, moving_wall, noslip,
                 pressure_outlet, slip_wall)
from .generators import (annulus_unstructured_mesh, backward_step_mesh,
                         cavity_mesh, channel_strip_mesh, cylinder_box_mesh,
                         graded_points, rectangle_mesh, tag_boundary)
from .operators import ElementOperators, assemble_operators
from .sampling import evaluate_pressure, evaluate_velocity
from .stepper import (SemiImplicitStepper, SolutionState, StepperConfig,
                      interpolate_state)
from .transport import cfl_dt
from .verify import (RadialVortexParams, WomersleyParams, blasius_reference,
                     detect_reattachment, l2_errors, potential_cylinder_exact,
                     potential_cylinder_velocity, radial_vortex_exact,
                     radial_vortex_velocity, strouhal, womersley_exact)

CASE_NAMES = ("vortex", "womersley", "blasius", "cavity", "step", "halfcyl",
              "cylinder-potential", "cylinder-vortexstreet")


@dataclass
class CaseResult:
    name: str
    ops: ElementOperators
    state: SolutionState
    stepper: SemiImplicitStepper
    metrics: dict = field(default_factory=dict)
    history: dict = field(default_factory=dict)
    steps: int = 0
    max_continuity: float = 0.0


def _integrate(stepper: SemiImplicitStepper, state: SolutionState,
               t_end: float, dt: float | None = None,
               steady_tol: float | None = None,
               sample_times=(), sampler=None,
               progress=None) -> tuple[int, float, list]:
    """March ``state`` to t_end (or to steady state), returning
    (steps, max continuity residual, samples taken at sample_times)."""
    cfg = stepper.cfg
    samples = []
    pending = sorted(t for t in sample_times if t > state.t + 1e-12)
    steps, cont = 0, 0.0
    while state.t < t_end - 1e-12:
        step = dt if dt is not None else cfl_dt(
            stepper.tab, state.V, cfg.cfl, cfg.dt_max)
        limit = pending[0] if pending else t_end
        step = min(step, limit - state.t, t_end - state.t)
        v_old = state.V.copy()
        rep = stepper.advance(state, step)
        steps += 1
        cont = max(cont, rep.continuity)
        if pending and state.t >= pending[0] - 1e-12:
            pending.pop(0)
            if sampler is not None:
                samples.append(sampler(state))
        if progress is not None:
            progress(state, rep)
        if steady_tol is not None:
            rate = float(np.abs(state.V - v_old).max()) / step
            if rate < steady_tol:
                break
    return steps, cont, samples


# ---------------------------------------------------------------------------
# radial vortex (spatial accuracy study on the annulus)
# ---------------------------------------------------------------------------

def run_vortex(level: int = 0, p: int = 1, t_end: float = 0.75,
               cfl: float = 0.4, progress=None) -> CaseResult:
    """Steady rotating-flow accuracy test on the annulus 1 < r < 5.

    level 0/1/2 -> ~125/504/2051 triangles (quasi-uniform unstructured).
    Exact azimuthal velocity is prescribed on the inner circle, exact
    pressure on the outer circle.
    """
    par = RadialVortexParams()

    def vel(x, y):
        return radial_vortex_velocity(x, y, par)

    def pres(x, y):
        return radial_vortex_exact(np.hypot(x, y), par)[1]

    mesh, curves, _ = annulus_unstructured_mesh(level, par.r_inner,
                                                par.r_outer)
    dual = meshmod.build_dual(mesh)
    ops = assemble_operators(mesh, dual, p, curves)
    bc = ResolvedBC.from_tags(mesh, ops.geo.bnd_edges, {
        1: moving_wall(lambda x, t: np.stack(vel(x[..., 0], x[..., 1]), -1)),
        2: pressure_outlet(lambda x, t: pres(x[..., 0], x[..., 1]))})
    st = SemiImplicitStepper(ops, bc, StepperConfig(
        nu=1.0e-5, theta=1.0, convective=True, cfl=cfl))
    s = interpolate_state(ops, vel, pres)
    steps, cont, _ = _integrate(st, s, t_end, progress=progress)
    err = l2_errors(ops, s.P, s.V, vel, pres)
    res = CaseResult("vortex", ops, s, st, steps=steps, max_continuity=cont)
    res.metrics = {"eps_p": err.pressure, "eps_v": err.velocity,
                   "n_tri": len(mesh.tris)}
    return res


def run_vortex_convergence(levels=(0, 1, 2), p: int = 1,
                           progress=None) -> dict:
    """Mesh sequence for the vortex case -> errors and observed orders."""
    eps_p, eps_v, n_tri = [], [], []
    for lv in levels:
        r = run_vortex(level=lv, p=p, progress=progress)
        eps_p.append(r.metrics["eps_p"])
        eps_v.append(r.metrics["eps_v"])
        n_tri.append(r.metrics["n_tri"])
    op = [math.log2(a / b) for a, b in zip(eps_p, eps_p[1:])]
    ov = [math.log2(a / b) for a, b in zip(eps_v, eps_v[1:])]
    return {"n_tri": n_tri, "eps_p": eps_p, "eps_v": eps_v,
            "order_p": op, "order_v": ov}


# ---------------------------------------------------------------------------
# oscillatory channel flow (exact Bessel-function profile)
# ---------------------------------------------------------------------------

def run_womersley(p: int = 3, dt: float = 0.01, t_end: float = 2.0,
                  sample_times=(1.2, 1.7, 1.9, 2.0),
                  n_profile: int = 81, progress=None) -> CaseResult:
    """Pulsatile channel flow driven by an oscillating pressure difference.

    Channel [-0.5, 1] x [-0.2, 0.2], 98 triangles, no convection, implicit
    viscosity, theta = 0.6.  The velocity profile at x = 0.1 is compared
    against the exact solution at the sample times.
    """
    par = WomersleyParams()
    amp = par.p_tilde / par.rho          # kinematic pressure-gradient amplitude

    def p_exact(x, t):
        # linear in x, gradient -amp*cos(omega t), zero at the outlet x = 1
        return amp * np.cos(par.omega * t) * (1.0 - x)

    mesh, _, _ = channel_strip_mesh(7, 7, length=par.L, x0=-0.5,
                                    half_height=par.D / 2.0)
    dual = meshmod.build_dual(mesh)
    ops = assemble_operators(mesh, dual, p, None)
    bc = ResolvedBC.from_tags(mesh, ops.geo.bnd_edges, {
        1: pressure_outlet(lambda x, t: p_exact(x[..., 0], t)),
        2: pressure_outlet(lambda x, t: p_exact(x[..., 0], t)),
        3: noslip()})
    st = SemiImplicitStepper(ops, bc, StepperConfig(
        nu=par.nu, theta=0.6, convective=False, viscous_implicit=True))
    s = interpolate_state(
        ops,
        lambda x, y: (womersley_exact(y, 0.0, par), np.zeros_like(x)),
        lambda x, y: p_exact(x, 0.0))

    ys = np.linspace(-par.D / 2.0, par.D / 2.0, n_profile)
    pts = np.column_stack([np.full_like(ys, 0.1), ys])

    def sampler(state):
        return evaluate_velocity(ops, state.V, pts)[:, 0]

    steps, cont, profiles = _integrate(st, s, t_end, dt=dt,
                                       sample_times=sample_times,
                                       sampler=sampler, progress=progress)
    res = CaseResult("womersley", ops, s, st, steps=steps, max_continuity=cont)
    rel = {}
    for t, u_num in zip(sorted(sample_times), profiles):
        u_ex = womersley_exact(ys, t, par)
        peak = np.abs(womersley_exact(ys, np.linspace(0, 2, 401)[:, None],
                                      par)).max()
        rel[t] = float(np.abs(u_num - u_ex).max() / peak)
    res.metrics = {"rel_linf": rel, "y": ys, "n_tri": len(mesh.tris)}
    res.history = {"profiles": profiles, "times": sorted(sample_times)}
    return res


# ---------------------------------------------------------------------------
# laminar flat-plate boundary layer (self-similar profile)
# ---------------------------------------------------------------------------

def run_blasius(p: int = 3, nu: float = 1.0e-3, t_end: float = 12.0,
                steady_tol: float = 2.0e-3, x_probe=(0.4, 0.6),
                progress=None) -> CaseResult:
    """Flat-plate boundary layer on [0,1] x [0,0.25], plate along y = 0.

    Uniform inflow u = 1 on the left, ambient pressure on top and right,
    no-slip plate from the leading edge at x = 0.  The horizontal velocity
    at the probe stations is compared to the similarity solution in the
    coordinate xi = y * sqrt(u_inf / (2 nu x)).
    """
    u_inf = 1.0
    ys = graded_points(0.0, 0.25, 10, beta=2.0, side="start")
    mesh, _, _ = rectangle_mesh(14, 10, 0.0, 1.0, 0.0, 0.25, ys=ys)
    dual = meshmod.build_dual(mesh)
    ops = assemble_operators(mesh, dual, p, None)
    bc = ResolvedBC.from_tags(mesh, ops.geo.bnd_edges, {
        1: moving_wall(lambda x, t: np.stack(
            [np.full(x.shape[:-1], u_inf), np.zeros(x.shape[:-1])], -1)),
        2: pressure_outlet(lambda x, t: np.zeros(x.shape[:-1])),
        3: noslip(),
        4: pressure_outlet(lambda x, t: np.zeros(x.shape[:-1]))})
    st = SemiImplicitStepper(ops, bc, StepperConfig(
        nu=nu, theta=1.0, convective=True, viscous_implicit=True,
        cfl=0.4, dt_max=0.05))
    s = interpolate_state(ops,
                          lambda x, y: (np.full_like(x, u_inf),
                                        np.zeros_like(x)),
                          lambda x, y: np.zeros_like(x))
    steps, cont, _ = _integrate(st, s, t_end, steady_tol=steady_tol,
                                progress=progress)

    xi = np.linspace(0.0, 6.0, 61)
    _, fp, _ = blasius_reference(xi)
    profiles = {}
    for x in x_probe:
        y = xi * np.sqrt(2.0 * nu * x / u_inf)
        pts = np.column_stack([np.full_like(y, x), y])
        u = evaluate_velocity(ops, s.V, pts)[:, 0] / u_inf
        profiles[x] = u
    res = CaseResult("blasius", ops, s, st, steps=steps, max_continuity=cont)
    res.metrics = {
        "xi": xi, "reference": fp, "profiles": profiles,
        "max_dev": {x: float(np.abs(profiles[x] - fp).max())
                    for x in x_probe},
        "self_similarity": float(np.abs(profiles[x_probe[0]]
                                        - profiles[x_probe[1]]).max()),
        "n_tri": len(mesh.tris)}
    return res


# ---------------------------------------------------------------------------
# lid-driven cavity
# ---------------------------------------------------------------------------

def run_cavity(re: float = 100.0, p: int = 3, t_end: float = 150.0,
               steady_tol: float = 1.0e-4, n: int = 6,
               progress=None) -> CaseResult:
    """Lid-driven cavity [-0.5,0.5]^2 at the given Reynolds number.

    The lid (y = 0.5) moves with u = 1; all other walls are no-slip.  The
    default 72-triangle grid matches the coarse-grid benchmark setup.
    Returns the vertical-centerline u profile for Ghia-table comparison.
    """
    mesh, _, _ = cavity_mesh(n)
    dual = meshmod.build_dual(mesh)
    ops = assemble_operators(mesh, dual, p, None)
    bc = ResolvedBC.from_tags(mesh, ops.geo.bnd_edges, {
        1: noslip(),
        2: moving_wall(lambda x, t: np.stack(
            [np.ones(x.shape[:-1]), np.zeros(x.shape[:-1])], -1))})
    st = SemiImplicitStepper(ops, bc, StepperConfig(
        nu=1.0 / re, theta=1.0, convective=True, viscous_implicit=True,
        cfl=0.4, dt_max=0.25))
    s = st.zero_state()
    steps, cont, _ = _integrate(st, s, t_end, steady_tol=steady_tol,
                                progress=progress)
    ys = np.linspace(-0.5, 0.5, 101)
    pts = np.column_stack([np.zeros_like(ys), ys])
    u = evaluate_velocity(ops, s.V, pts)[:, 0]
    res = CaseResult("cavity", ops, s, st, steps=steps, max_continuity=cont)
    res.metrics = {"y": ys, "u_centerline": u, "re": re,
                   "n_tri": len(mesh.tris)}
    return res


def cavity_centerline_u(result: CaseResult, y_query: np.ndarray) -> np.ndarray:
    """u(0, y) of a finished cavity run at arbitrary heights."""
    pts = np.column_stack([np.zeros_like(y_query), y_query])
    return evaluate_velocity(result.ops, result.state.V, pts)[:, 0]


# ---------------------------------------------------------------------------
# backward-facing step
# ---------------------------------------------------------------------------

def run_step(re: float = 100.0, p: int = 2, t_end: float = 80.0,
             steady_tol: float = 5.0e-4, dp: float | None = None,
             progress=None) -> CaseResult:
    """Pressure-driven flow over a backward-facing step.

    Inlet channel of height 0.5 expands to height 1 at x = 0; the flow is
    driven by a pressure difference between the two ends.  Re = D U / nu
    with D twice the inlet height and U the mean inlet velocity; nu is
    chosen so the developed inlet flow hits the requested Reynolds number.
    Reports the reattachment length X1 of the lower recirculation bubble.
    """
    step_h = 0.5
    mesh, _, _ = backward_step_mesh(h_cells=3, length_in=2.0, length_out=14.0,
                                    step=step_h)
    dual = meshmod.build_dual(mesh)
    ops = assemble_operators(mesh, dual, p, None)
    # developed-channel balance: dp/dx = 12 nu U / h^2 with h the inlet
    # height; pick nu = D U / Re with U = 1 and back out the pressure drop
    u_mean = 1.0
    d_h = 2.0 * (1.0 - step_h)
    nu = d_h * u_mean / re
    length = 16.0
    if dp is None:
        dp = 12.0 * nu * u_mean / (1.0 - step_h) ** 2 * length

    def p_in(x, t):
        return np.full(x.shape[:-1], dp)

    bc = ResolvedBC.from_tags(mesh, ops.geo.bnd_edges, {
        1: pressure_outlet(p_in),
        2: pressure_outlet(lambda x, t: np.zeros(x.shape[:-1])),
        3: noslip()})
    st = SemiImplicitStepper(ops, bc, StepperConfig(
        nu=nu, theta=1.0, convective=True, viscous_implicit=True,
        cfl=0.4, dt_max=0.2))
    s = st.zero_state()
    steps, cont, _ = _integrate(st, s, t_end, steady_tol=steady_tol,
                                progress=progress)
    xs = np.linspace(0.05, 13.5, 270)
    probe = np.column_stack([xs, np.full_like(xs, 0.02)])
    u_wall = evaluate_velocity(ops, s.V, probe)[:, 0]
    x1 = detect_reattachment(xs, u_wall)
    res = CaseResult("step", ops, s, st, steps=steps, max_continuity=cont)
    res.metrics = {"x1": x1, "x1_over_h": (None if x1 is None
                                           else x1 / step_h),
                   "re": re, "n_tri": len(mesh.tris)}
    return res


# ---------------------------------------------------------------------------
# rotational flow past a half-cylinder (qualitative)
# ---------------------------------------------------------------------------

def run_halfcyl(p: int = 2, t_end: float = 8.0, progress=None) -> CaseResult:
    """Shear flow over a half-cylinder bump on a wall (qualitative case).

    A linear-shear inflow passes over a semicircular bump; the run reports
    whether a closed recirculation region forms ahead of/behind the bump.
    """
    from .geom import Circle, CurveRegistry
    from scipy.spatial import Delaunay

    r_c, x0, x1, y1 = 1.0, -6.0, 10.0, 6.0
    pts = [np.column_stack([r_c * np.cos(th), r_c * np.sin(th)])
           for th in [np.linspace(0.02 * np.pi, 0.98 * np.pi, 24)]]
    rr = r_c
    for k in range(4):
        rr += 0.35 * 1.4 ** k
        th = np.linspace(0, np.pi, 26 + 2 * k)
        pts.append(np.column_stack([rr * np.cos(th), rr * np.sin(th)]))
    h = 0.85
    xs = np.arange(x0, x1 + h / 2, h)
    ys = np.arange(0.0, y1 + h / 2, h)
    X, Y = np.meshgrid(xs, ys)
    far = np.column_stack([X.ravel(), Y.ravel()])
    far = far[np.hypot(far[:, 0], far[:, 1]) > rr + 0.4 * h]
    pts.append(far)
    nodes = np.concatenate(pts)
    tri = Delaunay(nodes)
    c = nodes[tri.simplices].mean(axis=1)
    keep = (np.hypot(c[:, 0], c[:, 1]) > r_c) & (c[:, 1] > 0)
    mesh = meshmod.build_primal(nodes, tri.simplices[keep])
    eps = 1e-6

    def tag(m):
        if abs(m[0] - x0) < eps:
            return 1
        if abs(m[0] - x1) < eps:
            return 2
        if abs(m[1] - y1) < eps:
            return 3
        if np.hypot(m[0], m[1]) < r_c + 0.05:
            return 4
        return 5
    tag_boundary(mesh, tag)
    curves = CurveRegistry([Circle(0.0, 0.0, r_c)])
    dual = meshmod.build_dual(mesh)
    ops = assemble_operators(mesh, dual, p, curves)

    def shear(x, t):
        u = np.clip(x[..., 1] / 2.0, 0.0, 1.0)
        return np.stack([u, np.zeros_like(u)], -1)

    bc = ResolvedBC.from_tags(mesh, ops.geo.bnd_edges, {
        1: moving_wall(shear),
        2: pressure_outlet(lambda x, t: np.zeros(x.shape[:-1])),
        3: pressure_outlet(lambda x, t: np.zeros(x.shape[:-1])),
        4: noslip(), 5: noslip()})
    st = SemiImplicitStepper(ops, bc, StepperConfig(
        nu=5.0e-3, theta=1.0, convective=True, viscous_implicit=True,
        cfl=0.4, dt_max=0.2))
    s = st.zero_state()
    steps, cont, _ = _integrate(st, s, t_end, progress=progress)
    # recirculation detector: negative wall-parallel velocity downstream
    xs = np.linspace(1.2, 5.0, 80)
    probe = np.column_stack([xs, np.full_like(xs, 0.06)])
    u_wall = evaluate_velocity(ops, s.V, probe)[:, 0]
    res = CaseResult("halfcyl", ops, s, st, steps=steps, max_continuity=cont)
    res.metrics = {"recirculation": bool((u_wall < 0).any()),
                   "n_tri": len(mesh.tris)}
    return res


# ---------------------------------------------------------------------------
# flow over a circular cylinder: potential flow and vortex street
# ---------------------------------------------------------------------------

def run_cylinder_potential(p: int = 3, t_end: float = 10.0, u_bar: float = 0.01,
                           progress=None) -> CaseResult:
    """Inviscid flow around a cylinder of radius 1 in [-8,8]^2.

    The exact irrotational velocity is prescribed on the outer boundary,
    the cylinder is a slip wall, and the flow starts uniform.  Reports L2
    errors of (u, v, p) on sample rings, normalized by the freestream
    velocity (dynamic pressure for p).
    """
    r_c = 1.0
    mesh, curves, _ = cylinder_box_mesh(
        radius=r_c, half_width=8.0, length_up=8.0, length_down=8.0,
        n_ring=28, n_layers=5, layer_growth=1.35, h_far=0.62)
    dual = meshmod.build_dual(mesh)
    ops = assemble_operators(mesh, dual, p, curves)

    def vel_exact(x, y):
        return potential_cylinder_velocity(x, y, u_bar, r_c)

    bc = ResolvedBC.from_tags(mesh, ops.geo.bnd_edges, {
        1: moving_wall(lambda x, t: np.stack(
            vel_exact(x[..., 0], x[..., 1]), -1)),
        2: moving_wall(lambda x, t: np.stack(
            vel_exact(x[..., 0], x[..., 1]), -1)),
        3: moving_wall(lambda x, t: np.stack(
            vel_exact(x[..., 0], x[..., 1]), -1)),
        4: slip_wall()})
    st = SemiImplicitStepper(ops, bc, StepperConfig(
        nu=0.0, theta=0.6, convective=True, cfl=0.4, dt_max=0.5))
    s = interpolate_state(ops,
                          lambda x, y: (np.full_like(x, u_bar),
                                        np.zeros_like(x)),
                          lambda x, y: np.zeros_like(x))
    steps, cont, _ = _integrate(st, s, t_end, progress=progress)

    rings = {}
    phis = np.linspace(0.0, 2.0 * np.pi, 241, endpoint=False)
    p_gauge = float(np.mean(evaluate_pressure(
        ops, s.P, np.column_stack([4.0 * np.cos(phis), 4.0 * np.sin(phis)]))
        - potential_cylinder_exact(4.0, phis, u_bar, r_c)[2]))
    for r in (1.0, 1.5, 2.0):
        rr = max(r, r_c * 1.0001)
        pts = np.column_stack([rr * np.cos(phis), rr * np.sin(phis)])
        v_num = evaluate_velocity(ops, s.V, pts)
        p_num = evaluate_pressure(ops, s.P, pts) - p_gauge
        ur, uphi, p_ex = potential_cylinder_exact(rr, phis, u_bar, r_c)
        u_ex = ur * np.cos(phis) - uphi * np.sin(phis)
        v_ex = ur * np.sin(phis) + uphi * np.cos(phis)

        def ring_l2(err):
            return float(np.sqrt(np.mean(err ** 2)))
        rings[r] = {"u": ring_l2(v_num[:, 0] - u_ex) / u_bar,
                    "v": ring_l2(v_num[:, 1] - v_ex) / u_bar,
                    "p": ring_l2(p_num - p_ex) / (0.5 * u_bar ** 2)}
    res = CaseResult("cylinder-potential", ops, s, st, steps=steps,
                     max_continuity=cont)
    res.metrics = {"rings": rings, "n_tri": len(mesh.tris)}
    return res


def run_vortex_street(re: float = 125.0, p: int = 2, t_end: float = 180.0,
                      u_bar: float = 0.5, t_skip: float = 60.0,
                      progress=None) -> CaseResult:
    """Viscous cylinder wake on [-5,30] x [-10,10]: shedding frequency.

    nu is set from Re = 2 r u / nu with r = 1.  The cross-stream velocity
    at a wake probe is recorded and its dominant frequency converted to a
    Strouhal number St = 2 r f / u.
    """
    r_c = 1.0
    nu = 2.0 * r_c * u_bar / re
    mesh, curves, _ = cylinder_box_mesh(
        radius=r_c, half_width=10.0, length_up=5.0, length_down=30.0,
        n_ring=30, n_layers=5, layer_growth=1.4, h_far=0.78)
    dual = meshmod.build_dual(mesh)
    ops = assemble_operators(mesh, dual, p, curves)
    bc = ResolvedBC.from_tags(mesh, ops.geo.bnd_edges, {
        1: moving_wall(lambda x, t: np.stack(
            [np.full(x.shape[:-1], u_bar), np.zeros(x.shape[:-1])], -1)),
        2: pressure_outlet(lambda x, t: np.zeros(x.shape[:-1])),
        3: pressure_outlet(lambda x, t: np.zeros(x.shape[:-1])),
        4: noslip()})
    st = SemiImplicitStepper(ops, bc, StepperConfig(
        nu=nu, theta=1.0, convective=True, viscous_implicit=True,
        cfl=0.4, dt_max=0.25))
    # a slightly asymmetric start seeds the instability quickly
    s = interpolate_state(
        ops,
        lambda x, y: (np.full_like(x, u_bar),
                      0.02 * u_bar * np.exp(-((x - 2.0) ** 2 + y ** 2))),
        lambda x, y: np.zeros_like(x))
    probe = np.array([[4.0, 0.5]])
    times, signal = [], []

    def watch(state, rep):
        times.append(state.t)
        signal.append(float(evaluate_velocity(ops, state.V, probe)[0, 1]))
        if progress is not None:
            progress(state, rep)

    steps, cont, _ = _integrate(st, s, t_end, progress=watch)
    times = np.asarray(times)
    signal = np.asarray(signal)
    keep = times >= t_skip
    st_report = strouhal(times[keep], signal[keep], r_c, u_bar)
    res = CaseResult("cylinder-vortexstreet", ops, s, st, steps=steps,
                     max_continuity=cont)
    res.metrics = {"strouhal": st_report, "re": re, "n_tri": len(mesh.tris)}
    res.history = {"times": times, "signal": signal}
    return res


RUNNERS = {"vortex": run_vortex, "womersley": run_womersley,
           "blasius": run_blasius, "cavity": run_cavity, "step": run_step,
           "halfcyl": run_halfcyl, "cylinder-potential": run_cylinder_potential,
           "cylinder-vortexstreet": run_vortex_street}
