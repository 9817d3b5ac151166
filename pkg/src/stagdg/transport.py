"""Explicit nonlinear transport stage on the edge-based dual mesh.

Advances the momentum equation without the new pressure gradient: the
convective flux v (x) v and the viscous flux -nu grad v are integrated with a
Rusanov numerical flux across dual faces, in a TVD Runge-Kutta scheme of
third order.  A backward-Euler variant treats the viscous part implicitly
(matrix-free GMRES) for diffusion-dominated steps.

The velocity state is a padded array V of shape (n_edges, n_max, 2) with
n_max = (p+1)^2; boundary dual elements use only the first (p+1)(p+2)/2
entries and the padding stays identically zero.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bc import BCKind, ResolvedBC
from .basis import segment_rule, square_rule, triangle_rule
from .krylov import SolveReport, gmres
from .operators import ElementOperators, _inv2


def max_signal_speed(vn_minus: float, vn_plus: float, nu: float,
                     h_minus: float, h_plus: float, p: int) -> float:
    """Rusanov dissipation speed: convective eigenvalue plus a grid viscous
    scale, with h the incircle radii of the two dual elements."""
    conv = 2.0 * max(abs(vn_minus), abs(vn_plus))
    visc = 2.0 * nu / (h_minus + h_plus) * (2 * p + 1) / np.sqrt(np.pi / 2.0)
    return conv + visc


def rusanov_flux(v_minus, v_plus, g_minus, g_plus, n, s, nu):
    """Numerical momentum flux through a face with unit normal n.

    v_* are the velocity traces (..., 2), g_* the velocity gradient traces
    (..., 2, 2) with g[d, e] = d v_d / d x_e, s the dissipation speed.
    """
    vn_m = np.einsum("...d,...d->...", v_minus, n)
    vn_p = np.einsum("...d,...d->...", v_plus, n)
    conv = v_minus * vn_m[..., None] + v_plus * vn_p[..., None]
    visc = np.einsum("...de,...e->...d", g_minus + g_plus, n)
    return 0.5 * (conv - nu * visc) - 0.5 * np.asarray(s)[..., None] * (v_plus - v_minus)


def _eval_dual_traces(ops: ElementOperators, elems: np.ndarray, pts: np.ndarray):
    """Padded basis values/gradients of dual elements at physical points.

    elems (F,) edge ids, pts (F, n, 2) -> vals (F, n, Nmax), grads (F, n, Nmax, 2).
    """
    geo, basis = ops.geo, ops.basis
    F, n = pts.shape[:2]
    nmax = basis.n_psi
    vals = np.zeros((F, n, nmax))
    grads = np.zeros((F, n, nmax, 2))
    is_b = ops.mesh.is_boundary_edge[elems]
    for bnd in (False, True):
        sel = np.flatnonzero(is_b == bnd)
        if not len(sel):
            continue
        pos = geo.edge_pos[elems[sel]]
        maps = (geo.bnd_maps if bnd else geo.quad_maps).select(pos)
        ref = maps.inverse(pts[sel])
        v = basis.tri_eval(ref) if bnd else basis.quad_eval(ref)
        g = basis.tri_grad(ref) if bnd else basis.quad_grad(ref)
        Jinv, _ = _inv2(maps.jacobian(ref))
        g = np.einsum("eqkr,eqrd->eqkd", g, Jinv)
        nb = v.shape[-1]
        vals[sel, :, :nb] = v
        grads[sel, :, :nb] = g
    return vals, grads


@dataclass
class TransportTables:
    """Quadrature tables for the dual-mesh transport operator."""

    ops: ElementOperators
    nu: float
    nmax: int
    # volume integrals, split by element type
    i_els: np.ndarray       # (Ei,) edge ids of interior dual quads
    i_w: np.ndarray         # (Ei, nq) weight * |J|
    i_b: np.ndarray         # (nq, Npsi) reference basis values
    i_g: np.ndarray         # (Ei, nq, Npsi, 2) physical gradients
    b_els: np.ndarray       # (Eb,)
    b_w: np.ndarray
    b_b: np.ndarray         # (nqt, Nphi)
    b_g: np.ndarray
    # interior dual faces
    f_left: np.ndarray      # (F,)
    f_right: np.ndarray
    f_w: np.ndarray         # (F, nf)
    f_n: np.ndarray         # (F, 2) unit normal, left -> right
    f_bl: np.ndarray        # (F, nf, Nmax)
    f_br: np.ndarray
    f_gl: np.ndarray        # (F, nf, Nmax, 2)
    f_gr: np.ndarray
    f_h: np.ndarray         # (F, 2) incircle radii (left, right)
    # boundary arcs of boundary dual elements
    a_w: np.ndarray         # (Eb, ne)
    a_n: np.ndarray         # (Eb, ne, 2) outward unit normals
    a_pts: np.ndarray       # (Eb, ne, 2)
    a_b: np.ndarray         # (Eb, ne, Nphi)
    a_g: np.ndarray         # (Eb, ne, Nphi, 2)
    a_h: np.ndarray         # (Eb,)

    @property
    def n_elems(self) -> int:
        return len(self.ops.mesh.edges)

    def zero_state(self) -> np.ndarray:
        return np.zeros((self.n_elems, self.nmax, 2))


def build_transport(ops: ElementOperators, nu: float) -> TransportTables:
    geo, basis, mesh, dual = ops.geo, ops.basis, ops.mesh, ops.dual
    p = ops.p
    nmax = basis.n_psi

    rule_q = square_rule(2 * p + 8)
    rule_t = triangle_rule(2 * p + 8)
    rule_e = segment_rule(2 * p + 9)
    se, we = rule_e.points[:, 0], rule_e.weights

    # volume tables
    i_els = geo.int_edges
    if len(i_els):
        _, detq = _inv2(geo.quad_maps.jacobian(rule_q.points))
        i_w = rule_q.weights[None, :] * detq
        i_b = basis.quad_eval(rule_q.points)
        Jinv, _ = _inv2(geo.quad_maps.jacobian(rule_q.points))
        i_g = np.einsum("qkr,eqrd->eqkd", basis.quad_grad(rule_q.points), Jinv)
    else:
        i_w = np.zeros((0, len(rule_q.weights)))
        i_b = basis.quad_eval(rule_q.points)
        i_g = np.zeros((0, len(rule_q.weights), basis.n_psi, 2))
    b_els = geo.bnd_edges
    _, detb = _inv2(geo.bnd_maps.jacobian(rule_t.points))
    b_w = rule_t.weights[None, :] * detb
    b_b = basis.tri_eval(rule_t.points)
    Jinvb, _ = _inv2(geo.bnd_maps.jacobian(rule_t.points))
    b_g = np.einsum("qkr,eqrd->eqkd", basis.tri_grad(rule_t.points), Jinvb)

    # interior dual faces (straight segments between barycenters and nodes)
    f_left, f_right = dual.face_left, dual.face_right
    seg = dual.face_seg                                  # (F, 2, 2)
    f_pts = seg[:, None, 0] + se[None, :, None] * (seg[:, 1] - seg[:, 0])[:, None]
    f_w = we[None, :] * dual.face_length[:, None]
    f_n = dual.face_normal
    f_bl, f_gl = _eval_dual_traces(ops, f_left, f_pts)
    f_br, f_gr = _eval_dual_traces(ops, f_right, f_pts)
    f_h = np.stack([dual.incircle_radius[f_left], dual.incircle_radius[f_right]], axis=-1)

    # boundary arcs (the primal boundary edges themselves)
    a_pts, a_n, a_w = geo.edge_quadrature(b_els, se, we)
    a_bp, a_gp = _eval_dual_traces(ops, b_els, a_pts)
    nphi = basis.n_phi
    return TransportTables(
        ops=ops, nu=nu, nmax=nmax,
        i_els=i_els, i_w=i_w, i_b=i_b, i_g=i_g,
        b_els=b_els, b_w=b_w, b_b=b_b, b_g=b_g,
        f_left=f_left, f_right=f_right, f_w=f_w, f_n=f_n,
        f_bl=f_bl, f_br=f_br, f_gl=f_gl, f_gr=f_gr, f_h=f_h,
        a_w=a_w, a_n=a_n, a_pts=a_pts,
        a_b=a_bp[:, :, :nphi], a_g=a_gp[:, :, :nphi],
        a_h=dual.incircle_radius[b_els])


def _ghost_state(kind_codes, v_in, vbc, n):
    """Exterior trace from the interior trace by BC kind (vectorized)."""
    v_out = v_in.copy()
    vel = kind_codes == BCKind.VELOCITY
    v_out[vel] = 2.0 * vbc[vel] - v_in[vel]
    slip = kind_codes == BCKind.SLIP
    if np.any(slip):
        vn = np.einsum("eqd,eqd->eq", v_in[slip], n[slip])
        v_out[slip] = v_in[slip] - 2.0 * vn[..., None] * n[slip]
    return v_out


def transport_rhs(tab: TransportTables, V: np.ndarray, t: float,
                  bc: ResolvedBC, convective: bool = True,
                  nu: float | None = None,
                  bc_data: bool = True) -> np.ndarray:
    """M^-1 times the transport residual.

    convective=False with bc_data=False gives the homogeneous linear viscous
    operator used by the implicit step; bc_data toggles the inhomogeneous
    part of the ghost states.
    """
    if nu is None:
        nu = tab.nu
    ops = tab.ops
    p, basis = ops.p, ops.basis
    rhs = np.zeros_like(V)
    visc_coef = 2.0 * nu * (2 * p + 1) / np.sqrt(np.pi / 2.0)

    def point_flux(vv, gg):
        F = np.einsum("...d,...e->...de", vv, vv) if convective else 0.0
        return F - nu * gg

    # volume terms: + int grad(psi) : F
    if len(tab.i_els):
        vq = np.einsum("qk,akd->aqd", tab.i_b, V[tab.i_els])
        gq = np.einsum("aqke,akd->aqde", tab.i_g, V[tab.i_els])
        Fq = point_flux(vq, gq)
        np.add.at(rhs, tab.i_els,
                  np.einsum("aq,aqke,aqde->akd", tab.i_w, tab.i_g, Fq))
    nphi = basis.n_phi
    Vb = V[tab.b_els, :nphi]
    vq = np.einsum("qk,akd->aqd", tab.b_b, Vb)
    gq = np.einsum("aqke,akd->aqde", tab.b_g, Vb)
    Fq = point_flux(vq, gq)
    contrib = np.einsum("aq,aqke,aqde->akd", tab.b_w, tab.b_g, Fq)
    np.add.at(rhs[:, :nphi], tab.b_els, contrib)

    # interior dual faces
    vL = np.einsum("aqk,akd->aqd", tab.f_bl, V[tab.f_left])
    vR = np.einsum("aqk,akd->aqd", tab.f_br, V[tab.f_right])
    gL = np.einsum("aqke,akd->aqde", tab.f_gl, V[tab.f_left])
    gR = np.einsum("aqke,akd->aqde", tab.f_gr, V[tab.f_right])
    n = tab.f_n[:, None, :]
    s = visc_coef / tab.f_h.sum(-1)[:, None]
    if convective:
        vnL = (vL * n).sum(-1)
        vnR = (vR * n).sum(-1)
        s = s + 2.0 * np.maximum(np.abs(vnL), np.abs(vnR))
        conv = vL * vnL[..., None] + vR * vnR[..., None]
    else:
        conv = 0.0
    visc = ((gL + gR) * n[..., None, :]).sum(-1)
    Fn = 0.5 * (conv - nu * visc) - 0.5 * s[..., None] * (vR - vL)
    flx = tab.f_w[..., None] * Fn
    np.add.at(rhs, tab.f_left, -np.einsum("aqk,aqd->akd", tab.f_bl, flx))
    np.add.at(rhs, tab.f_right, np.einsum("aqk,aqd->akd", tab.f_br, flx))

    # boundary arcs: ghost states by BC kind
    v_in = np.einsum("aqk,akd->aqd", tab.a_b, Vb)
    g_in = np.einsum("aqke,akd->aqde", tab.a_g, Vb)
    vbc = bc.velocity_at(tab.a_pts, t) if bc_data else np.zeros_like(v_in)
    v_out = _ghost_state(bc.kinds, v_in, vbc, tab.a_n)
    sb = visc_coef / (2.0 * tab.a_h)[:, None]
    if convective:
        vnI = (v_in * tab.a_n).sum(-1)
        vnO = (v_out * tab.a_n).sum(-1)
        sb = sb + 2.0 * np.maximum(np.abs(vnI), np.abs(vnO))
        conv = v_in * vnI[..., None] + v_out * vnO[..., None]
    else:
        conv = 0.0
    visc = 2.0 * (g_in * tab.a_n[..., None, :]).sum(-1)
    Fn = 0.5 * (conv - nu * visc) - 0.5 * sb[..., None] * (v_out - v_in)
    flx = tab.a_w[..., None] * Fn
    np.add.at(rhs[:, :nphi], tab.b_els, -np.einsum("aqk,aqd->akd", tab.a_b, flx))

    out = np.zeros_like(V)
    if len(tab.i_els):
        out[tab.i_els] = np.einsum("akl,ald->akd", ops.Minv_int, rhs[tab.i_els])
    out[tab.b_els, :nphi] = np.einsum("akl,ald->akd", ops.Minv_bnd,
                                      rhs[tab.b_els, :nphi])
    return out


def cfl_dt(tab: TransportTables, V: np.ndarray, cfl: float = 0.5,
           dt_max: float = 0.1) -> float:
    """Explicit time step from the smallest dual incircle diameter."""
    speeds = [0.0]
    if len(tab.i_els):
        vq = np.einsum("qk,akd->aqd", tab.i_b, V[tab.i_els])
        speeds.append(np.sqrt((vq ** 2).sum(-1)).max())
    nphi = tab.ops.basis.n_phi
    vq = np.einsum("qk,akd->aqd", tab.b_b, V[tab.b_els, :nphi])
    if vq.size:
        speeds.append(np.sqrt((vq ** 2).sum(-1)).max())
    vmax = max(speeds)
    h_min = 2.0 * tab.ops.dual.incircle_radius.min()
    if vmax <= 0.0:
        return dt_max
    return min(dt_max, cfl / (2 * tab.ops.p + 1) * h_min / (2.0 * vmax))


def tvd_rk3_step(tab: TransportTables, V: np.ndarray, t: float, dt: float,
                 bc: ResolvedBC, convective: bool = True,
                 nu: float | None = None,
                 force: np.ndarray | None = None) -> np.ndarray:
    """One strong-stability-preserving RK3 step of the transport operator.

    `force` is an optional constant acceleration in the velocity layout
    (already multiplied by the inverse mass matrix), added to every stage.
    """
    def rhs(W, tau):
        r = transport_rhs(tab, W, tau, bc, convective, nu)
        return r if force is None else r + force

    k1 = V + dt * rhs(V, t)
    k2 = 0.75 * V + 0.25 * (k1 + dt * rhs(k1, t + dt))
    return (V + 2.0 * (k2 + dt * rhs(k2, t + 0.5 * dt))) / 3.0


def implicit_viscous_step(tab: TransportTables, V: np.ndarray, t_new: float,
                          dt: float, bc: ResolvedBC, tol: float = 1.0e-10,
                          restart: int = 30) -> tuple[np.ndarray, SolveReport]:
    """Backward-Euler viscous update (I - dt L_nu) v' = v, matrix-free GMRES.

    The inhomogeneous boundary data (evaluated at t_new) enters the right
    hand side through the affine part of the ghost states.
    """
    shape = V.shape

    def apply_A(x):
        Vx = x.reshape(shape)
        return (Vx - dt * transport_rhs(tab, Vx, t_new, bc, convective=False,
                                        bc_data=False)).ravel()

    affine = transport_rhs(tab, np.zeros_like(V), t_new, bc, convective=False,
                           bc_data=True)
    b = (V + dt * affine).ravel()
    x, rep = gmres(apply_A, b, x0=V.ravel(), tol=tol, restart=restart)
    return x.reshape(shape), rep
