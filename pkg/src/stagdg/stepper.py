"""Semi-implicit pressure-velocity coupling on the staggered mesh pair.

Each step: (1) an explicit transport stage produces the provisional momentum
Fv (convection, and viscosity unless treated implicitly); (2) the new
pressure solves the symmetric positive (semi-)definite system

    theta*dt * sum_j Q_ij^T M_j^-1 Q_ij  p = rhs(Fv, old pressure, BC data)

by matrix-free conjugate gradients; (3) the velocity is corrected with the
theta-weighted discrete pressure gradient.  The discrete divergence of the
corrected velocity vanishes to solver tolerance by construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .bc import BCKind, ResolvedBC
from .krylov import SolveReport, conjugate_gradient, zero_mean_projector
from .operators import ElementOperators
from .transport import (TransportTables, build_transport, cfl_dt,
                        implicit_viscous_step, transport_rhs, tvd_rk3_step)


@dataclass
class StepperConfig:
    nu: float = 0.0
    theta: float = 1.0
    convective: bool = True
    viscous_implicit: bool = False
    cg_tol: float = 1.0e-12
    cfl: float = 0.5
    dt_max: float = 0.1


@dataclass
class SolutionState:
    V: np.ndarray          # (n_edges, n_max, 2) dual velocity coefficients
    P: np.ndarray          # (n_tris, n_phi) primal pressure coefficients
    t: float = 0.0


@dataclass
class StepReport:
    pressure: SolveReport
    viscous: SolveReport | None = None
    dt: float = 0.0
    substeps: int = 1
    continuity: float = 0.0


class SemiImplicitStepper:
    def __init__(self, ops: ElementOperators, bc: ResolvedBC,
                 config: StepperConfig | None = None):
        self.ops = ops
        self.bc = bc
        self.cfg = config or StepperConfig()
        self.tab: TransportTables = build_transport(ops, self.cfg.nu)
        self.nphi = ops.basis.n_phi
        self.ntri = len(ops.mesh.tris)
        # effective boundary gradient: pressure-type edges keep the full
        # boundary jump, velocity/slip edges the volume part only
        pres = (bc.kinds == BCKind.PRESSURE)
        self.pres_mask = pres
        self.Qb_eff = np.where(pres[:, None, None, None], ops.QB, ops.QBvol)
        self.has_pressure_bc = bool(pres.any())
        self.project = (None if self.has_pressure_bc
                        else zero_mean_projector(np.ones(self.ntri * self.nphi)))
        self._theta_dt = None

    # -- building blocks -------------------------------------------------
    def _edge_gradient(self, P: np.ndarray):
        """(Q p)_j per edge group: (Ei, 2, Npsi), (Eb, 2, Nphi)."""
        ops = self.ops
        gi = (np.einsum("adkl,al->adk", ops.QL, P[ops.lidx])
              + np.einsum("adkl,al->adk", ops.QR, P[ops.ridx]))
        gb = np.einsum("adkl,al->adk", self.Qb_eff, P[ops.btri])
        return gi, gb

    def _divergence_dual(self, wi: np.ndarray, wb: np.ndarray) -> np.ndarray:
        """sum_j D_ij w_j with D = -Q^T; w given per edge group."""
        ops = self.ops
        out = np.zeros((self.ntri, self.nphi))
        np.add.at(out, ops.lidx, -np.einsum("adkl,adk->al", ops.QL, wi))
        np.add.at(out, ops.ridx, -np.einsum("adkl,adk->al", ops.QR, wi))
        np.add.at(out, ops.btri, -np.einsum("adkl,adk->al", self.Qb_eff, wb))
        return out

    def _minv(self, gi: np.ndarray, gb: np.ndarray):
        ops = self.ops
        return (np.einsum("akl,adl->adk", ops.Minv_int, gi),
                np.einsum("akl,adl->adk", ops.Minv_bnd, gb))

    def apply_pressure_operator(self, pflat: np.ndarray) -> np.ndarray:
        """Matrix-free A p = theta*dt * sum Q^T M^-1 Q p (flattened)."""
        P = pflat.reshape(self.ntri, self.nphi)
        gi, gb = self._edge_gradient(P)
        wi, wb = self._minv(gi, gb)
        return -self._theta_dt * self._divergence_dual(wi, wb).ravel()

    def boundary_pressure_term(self, t: float) -> np.ndarray:
        """G_j = integral psi p_ext n ds on pressure-type edges, (Eb, 2, Nphi)."""
        ops = self.ops
        pext = self.bc.pressure_at(ops.b_pts, t)
        G = np.einsum("aq,aqk,aq,aqd->adk", ops.b_wds, ops.b_psi, pext, ops.b_nrm)
        G[~self.pres_mask] = 0.0
        return G

    def boundary_flux(self, t: float) -> np.ndarray:
        """g_i = integral phi (v_bc . n) ds on velocity-type edges, (Nt, Nphi)."""
        ops = self.ops
        vbc = self.bc.velocity_at(ops.b_pts, t)
        vn = (vbc * ops.b_nrm).sum(-1)
        vn[self.pres_mask] = 0.0
        g = np.einsum("aq,aql,aq->al", ops.b_wds, ops.b_phi, vn)
        out = np.zeros((self.ntri, self.nphi))
        np.add.at(out, ops.btri, g)
        return out

    def split_state(self, V: np.ndarray):
        ops = self.ops
        return V[ops.int_edges], V[ops.bnd_edges, :self.nphi]

    # -- one full step ----------------------------------------------------
    def advance(self, state: SolutionState, dt: float) -> StepReport:
        cfg, ops, bc = self.cfg, self.ops, self.bc
        t0, t1 = state.t, state.t + dt
        self._theta_dt = cfg.theta * dt

        # transport stage
        V = state.V
        visc_rep = None
        substeps = 1
        nu_expl = 0.0 if cfg.viscous_implicit else cfg.nu
        if cfg.convective or nu_expl > 0.0:
            # Substep with the current pressure gradient as a frozen force and
            # remove its integral afterwards.  This leaves the stage value fed
            # to the projection unchanged to first order but makes discrete
            # steady states exact fixed points of the full step regardless of
            # dt (the substep right-hand side vanishes there, so the Runge-
            # Kutta composite contributes no dt^2-per-substep drift).
            gp_i, gp_b = self._edge_gradient(state.P)
            fi, fb = self._minv(gp_i, gp_b + self.boundary_pressure_term(t0))
            force = np.zeros_like(V)
            force[ops.int_edges] = -np.transpose(fi, (0, 2, 1))
            force[ops.bnd_edges, :self.nphi] = -np.transpose(fb, (0, 2, 1))
            dt_e = cfl_dt(self.tab, V, cfg.cfl, cfg.dt_max)
            substeps = max(1, int(np.ceil(dt / dt_e - 1e-12)))
            dts = dt / substeps
            tau = t0
            for _ in range(substeps):
                V = tvd_rk3_step(self.tab, V, tau, dts, bc,
                                 convective=cfg.convective, nu=nu_expl,
                                 force=force)
                tau += dts
            V = V - dt * force
        if cfg.viscous_implicit and cfg.nu > 0.0:
            V, visc_rep = implicit_viscous_step(self.tab, V, t1, dt, bc,
                                                tol=min(1e-10, cfg.cg_tol))
        Fvi, Fvb = self.split_state(V)

        # pressure system
        th, om = cfg.theta, 1.0 - cfg.theta
        G1 = self.boundary_pressure_term(t1)
        rhs_i = np.zeros((len(ops.int_edges), 2, ops.basis.n_psi))
        rhs_b = th * G1
        if om:
            gi0, gb0 = self._edge_gradient(state.P)
            G0 = self.boundary_pressure_term(t0)
            rhs_i += om * gi0
            rhs_b += om * (gb0 + G0)
        wi, wb = self._minv(dt * rhs_i, dt * rhs_b)
        b = (self._divergence_dual(wi, wb)
             - self._divergence_dual(np.swapaxes(Fvi, 1, 2), np.swapaxes(Fvb, 1, 2))
             - self.boundary_flux(t1))
        pnew_flat, rep = conjugate_gradient(
            self.apply_pressure_operator, b.ravel(),
            x0=state.P.ravel(), tol=cfg.cg_tol, project=self.project)
        Pn = pnew_flat.reshape(self.ntri, self.nphi)

        # velocity correction
        gi1, gb1 = self._edge_gradient(Pn)
        corr_i = th * gi1
        corr_b = th * (gb1 + G1)
        if om:
            corr_i += om * gi0
            corr_b += om * (gb0 + G0)
        ci, cb = self._minv(corr_i, corr_b)
        Vn = V.copy()
        Vn[ops.int_edges] -= dt * np.transpose(ci, (0, 2, 1))
        Vn[ops.bnd_edges, :self.nphi] -= dt * np.transpose(cb, (0, 2, 1))

        state.V, state.P, state.t = Vn, Pn, t1
        res = self.continuity_residual(state)
        return StepReport(pressure=rep, viscous=visc_rep, dt=dt,
                          substeps=substeps, continuity=res)

    def continuity_residual(self, state: SolutionState) -> float:
        """max |discrete divergence + prescribed boundary flux|."""
        vi, vb = self.split_state(state.V)
        r = (self._divergence_dual(np.swapaxes(vi, 1, 2), np.swapaxes(vb, 1, 2))
             + self.boundary_flux(state.t))
        return float(np.abs(r).max())

    def zero_state(self) -> SolutionState:
        return SolutionState(V=self.tab.zero_state(),
                             P=np.zeros((self.ntri, self.nphi)), t=0.0)


def interpolate_state(ops: ElementOperators, velocity=None, pressure=None,
                      t: float = 0.0) -> SolutionState:
    """Nodal interpolation of initial fields onto the staggered spaces.

    velocity(x, y) -> (u, v) and pressure(x, y) -> p; missing fields start
    at zero.
    """
    from .basis import quad_node_lattice, tri_node_lattice

    geo, basis = ops.geo, ops.basis
    tn = tri_node_lattice(ops.p)
    qn = quad_node_lattice(ops.p)
    ntri = len(ops.mesh.tris)
    P = np.zeros((ntri, basis.n_phi))
    V = np.zeros((len(ops.mesh.edges), basis.n_psi, 2))
    if pressure is not None:
        x = geo.tri_maps.forward(tn)
        P[:] = pressure(x[..., 0], x[..., 1])
    if velocity is not None:
        if len(geo.int_edges):
            x = geo.quad_maps.forward(qn)
            u, v = velocity(x[..., 0], x[..., 1])
            V[geo.int_edges, :, 0] = u
            V[geo.int_edges, :, 1] = v
        if len(geo.bnd_edges):
            x = geo.bnd_maps.forward(tn)
            u, v = velocity(x[..., 0], x[..., 1])
            V[geo.bnd_edges, :basis.n_phi, 0] = u
            V[geo.bnd_edges, :basis.n_phi, 1] = v
    return SolutionState(V=V, P=P, t=t)
