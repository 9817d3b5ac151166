"""Point evaluation of the discrete fields at arbitrary physical locations.

Used by case diagnostics (centerline profiles, boundary-layer cuts, probes).
Point location goes through a KD-tree of triangle barycenters followed by
inverse-map membership tests.
"""

from __future__ import annotations

import numpy as np
from scipy.spatial import cKDTree

from .geom import MapInversionError
from .operators import ElementOperators, _inv2


def locate_points(ops: ElementOperators, pts: np.ndarray, k: int = 12):
    """Containing triangle and reference coordinates for each point.

    pts (n, 2) -> (tri (n,), ref (n, 2)).  Raises ValueError for points
    outside the mesh (no candidate triangle contains them).
    """
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    geo = ops.geo
    tree = cKDTree(ops.mesh.barycenters)
    k = min(k, len(ops.mesh.tris))
    _, cand = tree.query(pts, k=k)
    cand = np.atleast_2d(cand)
    n = len(pts)
    tri = -np.ones(n, dtype=int)
    ref = np.zeros((n, 2))
    for col in range(cand.shape[1]):
        todo = np.flatnonzero(tri < 0)
        if not len(todo):
            break
        t = cand[todo, col]
        try:
            r = geo.tri_maps.select(t).inverse(pts[todo][:, None, :])[:, 0]
        except MapInversionError:
            continue
        lam = np.minimum(1 - r[:, 0] - r[:, 1], np.minimum(r[:, 0], r[:, 1]))
        ok = lam > -1e-9
        tri[todo[ok]] = t[ok]
        ref[todo[ok]] = r[ok]
    if np.any(tri < 0):
        bad = pts[tri < 0][0]
        raise ValueError(f"point {tuple(bad)} lies outside the mesh")
    return tri, ref


def _dual_of(ops: ElementOperators, tri: np.ndarray, ref: np.ndarray) -> np.ndarray:
    """Edge id of the dual sub-element containing each reference point."""
    lam = np.stack([1 - ref[:, 0] - ref[:, 1], ref[:, 0], ref[:, 1]], axis=-1)
    loc = np.argmin(lam, axis=-1)
    edge_loc = np.choose(loc, [1, 2, 0])   # opposite vertex -> local edge
    return ops.mesh.S[tri, edge_loc]


def evaluate_pressure(ops: ElementOperators, P: np.ndarray,
                      pts: np.ndarray) -> np.ndarray:
    tri, ref = locate_points(ops, pts)
    vals = ops.basis.tri_eval(ref)
    return np.einsum("nk,nk->n", vals, P[tri])


def evaluate_velocity(ops: ElementOperators, V: np.ndarray,
                      pts: np.ndarray) -> np.ndarray:
    """(n, 2) velocities from the dual elements containing the points."""
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    tri, ref = locate_points(ops, pts)
    edge = _dual_of(ops, tri, ref)
    geo, basis = ops.geo, ops.basis
    out = np.zeros((len(pts), 2))
    isb = ops.mesh.is_boundary_edge[edge]
    for bnd in (False, True):
        sel = np.flatnonzero(isb == bnd)
        if not len(sel):
            continue
        pos = geo.edge_pos[edge[sel]]
        maps = (geo.bnd_maps if bnd else geo.quad_maps).select(pos)
        r = maps.inverse(pts[sel][:, None, :])[:, 0]
        if bnd:
            bv = basis.tri_eval(r)
            dof = V[edge[sel], :basis.n_phi]
        else:
            bv = basis.quad_eval(r)
            dof = V[edge[sel], :basis.n_psi]
        out[sel] = np.einsum("nk,nkd->nd", bv, dof)
    return out
