"""Output writers: legacy ASCII VTK fields, CSV tables, binary checkpoints.

Fields are sampled on per-element visualization lattices (degree p+1) and
written as sub-triangulated patches: primal triangles carry the pressure,
dual elements carry velocity and vorticity; each point also gets the
complementary field evaluated from the element it falls in, so standard
viewers can contour everything from one file.
"""

from __future__ import annotations

import hashlib
import json
import struct

import numpy as np

from .basis import BasisSet, tri_node_lattice, quad_node_lattice
from .operators import ElementOperators, _inv2


def _tri_sublattice_cells(q: int) -> np.ndarray:
    """Triangulation of the degree-q triangle lattice (row-major node order)."""
    cells = []
    row_start = []
    k = 0
    for j in range(q + 1):
        row_start.append(k)
        k += q + 1 - j
    for j in range(q):
        for i in range(q - j):
            a = row_start[j] + i
            b = a + 1
            c = row_start[j + 1] + i
            cells.append([a, b, c])
            if i < q - j - 1:
                cells.append([b, row_start[j + 1] + i + 1, c])
    return np.array(cells, dtype=int)


def _quad_sublattice_cells(q: int) -> np.ndarray:
    cells = []
    for j in range(q):
        for i in range(q):
            a = j * (q + 1) + i
            b = a + 1
            c = a + q + 2
            d = a + q + 1
            cells += [[a, b, c], [a, c, d]]
    return np.array(cells, dtype=int)


def _dual_element_of_ref_point(ops: ElementOperators, tri: int, ref: np.ndarray) -> int:
    """Edge id of the dual sub-element containing a reference point of
    triangle `tri` (barycentric decomposition around the centroid)."""
    lam = np.array([1.0 - ref[0] - ref[1], ref[0], ref[1]])
    # sub-triangle of local edge l = (centroid, vertex l, vertex l+1):
    # the point belongs to the edge whose opposite vertex has smallest weight
    loc = int(np.argmin(lam))
    # local edges: 0:(v0,v1) opp v2 ; 1:(v1,v2) opp v0 ; 2:(v2,v0) opp v1
    edge_loc = {2: 0, 0: 1, 1: 2}[loc]
    return int(ops.mesh.S[tri, edge_loc])


def sample_fields(ops: ElementOperators, P: np.ndarray, V: np.ndarray):
    """Visualization patches: returns (points, cells, point_data dict)."""
    geo, basis, mesh = ops.geo, ops.basis, ops.mesh
    p = ops.p
    q = p + 1
    viz_tri = BasisSet(q)
    lat_t = tri_node_lattice(q)
    lat_q = quad_node_lattice(q)

    pts_all, cells_all, data = [], [], {"p": [], "u": [], "v": [], "vorticity": []}
    offset = 0

    def tri_pressure(tri_idx, phys):
        ref = geo.tri_maps.select(tri_idx).inverse(phys)
        return np.einsum("aqk,ak->aq", basis.tri_eval(ref), P[tri_idx])

    # primal patches: pressure native, velocity from the containing dual element
    xt = geo.tri_maps.forward(lat_t)                    # (Nt, n, 2)
    ph = np.einsum("qk,ak->aq", basis.tri_eval(lat_t), P)
    cells_t = _tri_sublattice_cells(q)
    nt, nn = xt.shape[:2]
    uu = np.zeros((nt, nn))
    vv = np.zeros((nt, nn))
    ww = np.zeros((nt, nn))
    for i in range(nt):
        for k in range(nn):
            j = _dual_element_of_ref_point(ops, i, lat_t[k])
            pos = geo.edge_pos[j]
            if mesh.is_boundary_edge[j]:
                m = geo.bnd_maps.select([pos])
                ref = m.inverse(xt[i, k][None, None])[0]
                bv = basis.tri_eval(ref)[0]
                bg = basis.tri_grad(ref)[0]
                dof = V[j, :basis.n_phi]
            else:
                m = geo.quad_maps.select([pos])
                ref = m.inverse(xt[i, k][None, None])[0]
                bv = basis.quad_eval(ref)[0]
                bg = basis.quad_grad(ref)[0]
                dof = V[j, :basis.n_psi]
            Jinv, _ = _inv2(m.jacobian(ref[None]))
            g = np.einsum("kr,rd->kd", bg, Jinv[0, 0])
            vel = bv @ dof
            grad = np.einsum("kd,ke->de", g, dof)      # grad[d,e]=dv_e/dx_d
            uu[i, k], vv[i, k] = vel
            ww[i, k] = grad[0, 1] - grad[1, 0]
    pts_all.append(xt.reshape(-1, 2))
    for i in range(nt):
        cells_all.append(cells_t + offset + i * nn)
    offset += nt * nn
    data["p"].append(ph.ravel())
    data["u"].append(uu.ravel())
    data["v"].append(vv.ravel())
    data["vorticity"].append(ww.ravel())

    # dual patches: velocity native, pressure from the owning triangle
    for bnd, edges, maps, lat, cells_d, nb in (
            (False, geo.int_edges, geo.quad_maps, lat_q,
             _quad_sublattice_cells(q), basis.n_psi),
            (True, geo.bnd_edges, geo.bnd_maps, lat_t,
             _tri_sublattice_cells(q), basis.n_phi)):
        if not len(edges):
            continue
        x = maps.forward(lat)                           # (E, n, 2)
        bv = basis.tri_eval(lat) if bnd else basis.quad_eval(lat)
        bg = basis.tri_grad(lat) if bnd else basis.quad_grad(lat)
        Jinv, _ = _inv2(maps.jacobian(lat))
        dof = V[edges, :nb]
        vel = np.einsum("qk,akd->aqd", bv, dof)
        g = np.einsum("qkr,aqrd->aqkd", bg, Jinv)
        grad = np.einsum("aqkd,ake->aqde", g, dof)
        vort = grad[..., 0, 1] - grad[..., 1, 0]
        # owning triangle: left for boundary, nearest side for interior
        own = ops.mesh.left_of[edges]
        ph_d = tri_pressure(own, x)
        right = ops.mesh.right_of[edges]
        if not bnd:
            # points on the right half get the right triangle's pressure
            refL = geo.tri_maps.select(own).inverse(x)
            lam_min = np.minimum(1 - refL[..., 0] - refL[..., 1],
                                 np.minimum(refL[..., 0], refL[..., 1]))
            outside = lam_min < -1e-10
            if outside.any():
                ph_r = tri_pressure(right, x)
                ph_d = np.where(outside, ph_r, ph_d)
        ne, nn = x.shape[:2]
        pts_all.append(x.reshape(-1, 2))
        for i in range(ne):
            cells_all.append(cells_d + offset + i * nn)
        offset += ne * nn
        data["p"].append(ph_d.ravel())
        data["u"].append(vel[..., 0].ravel())
        data["v"].append(vel[..., 1].ravel())
        data["vorticity"].append(vort.ravel())

    points = np.concatenate(pts_all)
    cells = np.concatenate(cells_all)
    point_data = {k: np.concatenate(v) for k, v in data.items()}
    return points, cells, point_data


def write_vtk(path, ops: ElementOperators, P: np.ndarray, V: np.ndarray,
              title: str = "fields") -> None:
    """Legacy ASCII VTK unstructured grid with p, u, v, vorticity."""
    points, cells, data = sample_fields(ops, P, V)
    n, m = len(points), len(cells)
    with open(path, "w") as f:
        f.write("# vtk DataFile Version 3.0\n")
        f.write(f"{title}\nASCII\nDATASET UNSTRUCTURED_GRID\n")
        f.write(f"POINTS {n} double\n")
        for x, y in points:
            f.write(f"{x:.12g} {y:.12g} 0\n")
        f.write(f"CELLS {m} {4 * m}\n")
        for c in cells:
            f.write(f"3 {c[0]} {c[1]} {c[2]}\n")
        f.write(f"CELL_TYPES {m}\n")
        f.write("5\n" * m)
        f.write(f"POINT_DATA {n}\n")
        for name in ("p", "u", "v", "vorticity"):
            f.write(f"SCALARS {name} double 1\nLOOKUP_TABLE default\n")
            np.savetxt(f, data[name], fmt="%.12g")
        f.write("VECTORS velocity double\n")
        np.savetxt(f, np.column_stack([data["u"], data["v"],
                                       np.zeros(n)]), fmt="%.12g")


def config_hash(config: dict) -> str:
    """Stable short hash of a configuration mapping (reproducibility tag)."""
    text = json.dumps({k: repr(v) for k, v in sorted(config.items())})
    return hashlib.sha256(text.encode()).hexdigest()[:12]


def write_csv(path, columns: dict, header: dict | None = None) -> None:
    """CSV table with '#'-prefixed provenance header lines."""
    names = list(columns)
    rows = np.column_stack([np.asarray(columns[k], dtype=float) for k in names])
    with open(path, "w") as f:
        for k, v in (header or {}).items():
            f.write(f"# {k}: {v}\n")
        f.write(",".join(names) + "\n")
        for row in rows:
            f.write(",".join(f"{x:.12g}" for x in row) + "\n")


def read_csv(path):
    """Read a CSV written by write_csv (or a shipped reference table)."""
    header = {}
    with open(path) as f:
        lines = f.readlines()
    body = []
    for ln in lines:
        if ln.startswith("#"):
            key, _, val = ln[1:].partition(":")
            header[key.strip()] = val.strip()
        elif ln.strip():
            body.append(ln.strip())
    names = body[0].split(",")
    vals = np.array([[float(x) for x in ln.split(",")] for ln in body[1:]])
    return {n: vals[:, k] for k, n in enumerate(names)}, header


_CHK_MAGIC = b"SDGCHK1\n"


def save_checkpoint(path, t: float, P: np.ndarray, V: np.ndarray,
                    p_degree: int) -> None:
    with open(path, "wb") as f:
        f.write(_CHK_MAGIC)
        f.write(struct.pack("<dq", t, p_degree))
        for arr in (P, V):
            f.write(struct.pack("<q", arr.ndim))
            f.write(struct.pack(f"<{arr.ndim}q", *arr.shape))
            f.write(np.ascontiguousarray(arr, dtype="<f8").tobytes())


def load_checkpoint(path):
    with open(path, "rb") as f:
        if f.read(len(_CHK_MAGIC)) != _CHK_MAGIC:
            raise ValueError(f"{path} is not a checkpoint")
        t, p_degree = struct.unpack("<dq", f.read(16))
        out = []
        for _ in range(2):
            (ndim,) = struct.unpack("<q", f.read(8))
            shape = struct.unpack(f"<{ndim}q", f.read(8 * ndim))
            n = int(np.prod(shape))
            out.append(np.frombuffer(f.read(8 * n), dtype="<f8")
                       .reshape(shape).copy())
    return t, out[0], out[1], p_degree
