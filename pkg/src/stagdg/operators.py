"""Precomputed element matrices of the staggered scheme.

Per dual element j: the mass matrix M_j.  Per (triangle i, edge j in S_i):
the gradient pairing Q_ij (and the divergence pairing D_ij = -Q_ij^T).
Boundary edges use triangle bases on the boundary dual element and carry the
modified matrices Q^d (full, for pressure-type boundaries) and the
volume-only variant (pressure jump neglected, for velocity-type boundaries).

All blocks depend only on mesh geometry and polynomial degree and are
assembled once; the time loop only applies them.
"""

from __future__ import annotations

import hashlib
import struct
from dataclasses import dataclass

import numpy as np

from .basis import BasisSet, segment_rule, square_rule, triangle_rule
from .geom import CurveRegistry, MeshGeometry
from .mesh import DualGrid, PrimalMesh, subelement_vertices


class AssemblyError(RuntimeError):
    """Element assembly produced an invalid matrix (bad Jacobian or quadrature)."""


def _inv2(J):
    det = J[..., 0, 0] * J[..., 1, 1] - J[..., 0, 1] * J[..., 1, 0]
    inv = np.empty_like(J)
    inv[..., 0, 0] = J[..., 1, 1]
    inv[..., 0, 1] = -J[..., 0, 1]
    inv[..., 1, 0] = -J[..., 1, 0]
    inv[..., 1, 1] = J[..., 0, 0]
    return inv / det[..., None, None], det


def tri_basis_at(geo: MeshGeometry, basis: BasisSet, tri_idx: np.ndarray,
                 phys: np.ndarray):
    """Solution-basis values and physical gradients of triangles at points.

    tri_idx (E,), phys (E, n, 2) -> vals (E, n, N_phi), grads (E, n, N_phi, 2).
    """
    maps = geo.tri_maps.select(tri_idx)
    ref = maps.inverse(phys)
    vals = basis.tri_eval(ref)
    gref = basis.tri_grad(ref)
    Jinv, det = _inv2(maps.jacobian(ref))
    if np.any(det <= 0):
        raise AssemblyError("non-positive triangle Jacobian")
    grads = np.einsum("eqlr,eqrd->eqld", gref, Jinv)
    return vals, grads


@dataclass
class ElementOperators:
    """All precomputed blocks, stored contiguously per edge group."""

    p: int
    basis: BasisSet
    geo: MeshGeometry
    mesh: PrimalMesh
    dual: DualGrid
    int_edges: np.ndarray   # (Ei,) edge ids
    bnd_edges: np.ndarray   # (Eb,)
    lidx: np.ndarray        # (Ei,) left triangle of each interior edge
    ridx: np.ndarray        # (Ei,)
    btri: np.ndarray        # (Eb,) owning triangle of each boundary edge
    M_int: np.ndarray       # (Ei, Npsi, Npsi)
    Minv_int: np.ndarray
    QL: np.ndarray          # (Ei, 2, Npsi, Nphi)  Q_{l(j),j}
    QR: np.ndarray          # (Ei, 2, Npsi, Nphi)  Q_{r(j),j}
    M_bnd: np.ndarray       # (Eb, Nphi, Nphi)
    Minv_bnd: np.ndarray
    QB: np.ndarray          # (Eb, 2, Nphi, Nphi)  full boundary gradient block
    QBvol: np.ndarray       # (Eb, 2, Nphi, Nphi)  volume term only
    # boundary edge trace tables for runtime BC data
    b_pts: np.ndarray       # (Eb, ne, 2)
    b_nrm: np.ndarray       # (Eb, ne, 2) outward unit normals
    b_wds: np.ndarray       # (Eb, ne) arc weights
    b_psi: np.ndarray       # (Eb, ne, Nphi) boundary dual basis traces
    b_phi: np.ndarray       # (Eb, ne, Nphi) primal basis traces

    # -- per-edge accessors (spec-level API) -----------------------------
    def mass(self, j: int) -> np.ndarray:
        pos = self.geo.edge_pos[j]
        return self.M_bnd[pos] if self.mesh.is_boundary_edge[j] else self.M_int[pos]

    def grad(self, i: int, j: int) -> np.ndarray:
        """Q_ij, shape (2, Npsi_or_Nphi, Nphi)."""
        pos = self.geo.edge_pos[j]
        if self.mesh.is_boundary_edge[j]:
            if i != self.mesh.left_of[j]:
                raise ValueError(f"triangle {i} not incident to boundary edge {j}")
            return self.QB[pos]
        if i == self.mesh.left_of[j]:
            return self.QL[pos]
        if i == self.mesh.right_of[j]:
            return self.QR[pos]
        raise ValueError(f"triangle {i} not incident to edge {j}")

    def div(self, i: int, j: int) -> np.ndarray:
        """D_ij = -Q_ij^T, shape (2, Nphi, Npsi_or_Nphi)."""
        q = self.grad(i, j)
        return -np.transpose(q, (0, 2, 1))


def assemble_operators(mesh: PrimalMesh, dual: DualGrid, p: int,
                       curves: CurveRegistry | None = None,
                       geo: MeshGeometry | None = None) -> ElementOperators:
    basis = BasisSet(p)
    if geo is None:
        geo = MeshGeometry(mesh, p, curves)
    nphi, npsi = basis.n_phi, basis.n_psi

    rule_q = square_rule(2 * p + 8)
    rule_t = triangle_rule(2 * p + 8)
    rule_e = segment_rule(2 * p + 9)        # p + 2 Gauss points
    se, we = rule_e.points[:, 0], rule_e.weights

    int_edges, bnd_edges = geo.int_edges, geo.bnd_edges
    Ei, Eb = len(int_edges), len(bnd_edges)
    lidx = mesh.left_of[int_edges]
    ridx = mesh.right_of[int_edges]
    btri = mesh.left_of[bnd_edges]

    # ---- interior edges -------------------------------------------------
    if Ei:
        psi_q = basis.quad_eval(rule_q.points)            # (nq, Npsi)
        _, detq = _inv2(geo.quad_maps.jacobian(rule_q.points))
        if np.any(detq <= 0):
            raise AssemblyError("non-positive dual-quad Jacobian")
        wdet = rule_q.weights[None, :] * detq             # (Ei, nq)
        M_int = np.einsum("qk,ql,eq->ekl", psi_q, psi_q, wdet)

        QL = np.zeros((Ei, 2, npsi, nphi))
        QR = np.zeros((Ei, 2, npsi, nphi))
        # volume term, integrated over the two straight sub-triangles
        # (barycenter, a, b) that tile both the dual quad and the primal
        # triangles.  The dual basis pulled back through the bilinear quad
        # map is not polynomial on these sub-triangles, and its quadrature
        # error decays slowly with the rule degree, so a very high-order
        # rule is used here; the term is precomputed once, so the cost is
        # assembly-only.
        rule_v = triangle_rule(max(40, 2 * p + 8))
        lam_v = np.stack([1 - rule_v.points[:, 0] - rule_v.points[:, 1],
                          rule_v.points[:, 0], rule_v.points[:, 1]], axis=-1)
        for side, tri_arr, Q in (("L", lidx, QL), ("R", ridx, QR)):
            sub = np.empty((Ei, 3, 2))
            for k, j in enumerate(int_edges):
                sub[k] = subelement_vertices(mesh, tri_arr[k], j)
            xq = np.einsum("qv,evd->eqd", lam_v, sub)     # (Ei, nq, 2)
            a2 = np.abs((sub[:, 1, 0] - sub[:, 0, 0]) * (sub[:, 2, 1] - sub[:, 0, 1])
                        - (sub[:, 1, 1] - sub[:, 0, 1]) * (sub[:, 2, 0] - sub[:, 0, 0]))
            w = rule_v.weights[None, :] * a2[:, None]
            refq = geo.quad_maps.inverse(xq)
            psi = basis.quad_eval(refq)                   # (Ei, nq, Npsi)
            _, grads = tri_basis_at(geo, basis, tri_arr, xq)
            Q += np.einsum("eq,eqk,eqld->edkl", w, psi, grads)

        # edge term: - integral psi phi sigma n ds
        pe, ne_, wds = geo.edge_quadrature(int_edges, se, we)
        refq = geo.quad_maps.inverse(pe)
        psi_e = basis.quad_eval(refq)
        for sign, tri_arr, Q in ((+1.0, lidx, QL), (-1.0, ridx, QR)):
            phi_e, _ = tri_basis_at(geo, basis, tri_arr, pe)
            Q -= sign * np.einsum("eq,eqk,eql,eqd->edkl", wds, psi_e, phi_e, ne_)
    else:
        M_int = np.zeros((0, npsi, npsi))
        QL = QR = np.zeros((0, 2, npsi, nphi))

    # ---- boundary edges --------------------------------------------------
    if Eb:
        psi_t = basis.tri_eval(rule_t.points)             # (nq, Nphi)
        _, detb = _inv2(geo.bnd_maps.jacobian(rule_t.points))
        if np.any(detb <= 0):
            raise AssemblyError("non-positive boundary-dual Jacobian")
        wdetb = rule_t.weights[None, :] * detb
        M_bnd = np.einsum("qk,ql,eq->ekl", psi_t, psi_t, wdetb)

        xb = geo.bnd_maps.forward(rule_t.points)          # (Eb, nq, 2)
        _, grads = tri_basis_at(geo, basis, btri, xb)
        QBvol = np.einsum("eq,qk,eqld->edkl", wdetb, psi_t, grads)

        b_pts, b_nrm, b_wds = geo.edge_quadrature(bnd_edges, se, we)
        refb = geo.bnd_maps.inverse(b_pts)
        b_psi = basis.tri_eval(refb)
        b_phi, _ = tri_basis_at(geo, basis, btri, b_pts)
        QB = QBvol - np.einsum("eq,eqk,eql,eqd->edkl", b_wds, b_psi, b_phi, b_nrm)
    else:
        M_bnd = np.zeros((0, nphi, nphi))
        QB = QBvol = np.zeros((0, 2, nphi, nphi))
        ne0 = len(se)
        b_pts = np.zeros((0, ne0, 2))
        b_nrm = np.zeros((0, ne0, 2))
        b_wds = np.zeros((0, ne0))
        b_psi = b_phi = np.zeros((0, ne0, nphi))

    for name, M in (("interior", M_int), ("boundary", M_bnd)):
        if len(M):
            try:
                np.linalg.cholesky(M)
            except np.linalg.LinAlgError as e:
                raise AssemblyError(f"{name} mass matrix is not SPD") from e

    return ElementOperators(
        p=p, basis=basis, geo=geo, mesh=mesh, dual=dual,
        int_edges=int_edges, bnd_edges=bnd_edges,
        lidx=lidx, ridx=ridx, btri=btri,
        M_int=M_int, Minv_int=np.linalg.inv(M_int) if Ei else M_int,
        QL=QL, QR=QR,
        M_bnd=M_bnd, Minv_bnd=np.linalg.inv(M_bnd) if Eb else M_bnd,
        QB=QB, QBvol=QBvol,
        b_pts=b_pts, b_nrm=b_nrm, b_wds=b_wds, b_psi=b_psi, b_phi=b_phi)


# ---------------------------------------------------------------------------
# binary dump / reload
# ---------------------------------------------------------------------------

_MAGIC = b"SDGOPS1\n"
_FIELDS = ("M_int", "QL", "QR", "M_bnd", "QB", "QBvol",
           "b_pts", "b_nrm", "b_wds", "b_psi", "b_phi")


def mesh_hash(mesh: PrimalMesh) -> bytes:
    h = hashlib.sha256()
    h.update(np.ascontiguousarray(mesh.nodes).tobytes())
    h.update(np.ascontiguousarray(mesh.tris).tobytes())
    return h.digest()


def save_operators(path, ops: ElementOperators) -> None:
    """Dump assembled blocks: magic, mesh hash, counts, little-endian f64."""
    with open(path, "wb") as f:
        f.write(_MAGIC)
        f.write(mesh_hash(ops.mesh))
        f.write(struct.pack("<3q", ops.p, len(ops.int_edges), len(ops.bnd_edges)))
        for name in _FIELDS:
            arr = getattr(ops, name)
            f.write(struct.pack("<q", arr.ndim))
            f.write(struct.pack(f"<{arr.ndim}q", *arr.shape))
            f.write(np.ascontiguousarray(arr, dtype="<f8").tobytes())


def load_operators(path, mesh: PrimalMesh, dual: DualGrid, p: int,
                   curves: CurveRegistry | None = None) -> ElementOperators:
    """Reload a dump; falls back to assembly if the key does not match."""
    with open(path, "rb") as f:
        if f.read(len(_MAGIC)) != _MAGIC:
            raise ValueError(f"{path} is not an operator dump")
        if f.read(32) != mesh_hash(mesh):
            raise ValueError("operator dump does not match this mesh")
        fp, ei, eb = struct.unpack("<3q", f.read(24))
        if fp != p:
            raise ValueError(f"operator dump has p={fp}, requested p={p}")
        data = {}
        for name in _FIELDS:
            (ndim,) = struct.unpack("<q", f.read(8))
            shape = struct.unpack(f"<{ndim}q", f.read(8 * ndim))
            n = int(np.prod(shape))
            data[name] = np.frombuffer(f.read(8 * n), dtype="<f8").reshape(shape).copy()

    geo = MeshGeometry(mesh, p, curves)
    basis = BasisSet(p)
    return ElementOperators(
        p=p, basis=basis, geo=geo, mesh=mesh, dual=dual,
        int_edges=geo.int_edges, bnd_edges=geo.bnd_edges,
        lidx=mesh.left_of[geo.int_edges], ridx=mesh.right_of[geo.int_edges],
        btri=mesh.left_of[geo.bnd_edges],
        Minv_int=np.linalg.inv(data["M_int"]) if ei else data["M_int"],
        Minv_bnd=np.linalg.inv(data["M_bnd"]) if eb else data["M_bnd"],
        **data)
