"""Primal triangular mesh and edge-based staggered dual grid.

The primal grid is a conforming triangulation; pressure unknowns live on it.
Each edge j carries a dual control volume R_j: the quadrilateral spanned by
the two adjacent barycenters and the edge endpoints (interior edges), or the
sub-triangle between the edge and the barycenter of its only neighbor
(boundary edges).  Velocity unknowns live on the dual grid.

Orientation conventions: triangles are counter-clockwise; every edge stores
its endpoints (a, b) in the order traversed by the left triangle l(j), so the
unit normal n_j (the 90-degree clockwise rotation of b - a) points from l(j)
into r(j), and outward on boundary edges.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linprog


class MeshError(ValueError):
    """Invalid or non-conforming mesh input."""


# ---------------------------------------------------------------------------
# primal mesh
# ---------------------------------------------------------------------------

@dataclass
class PrimalMesh:
    nodes: np.ndarray            # (Nn, 2)
    tris: np.ndarray             # (Ni, 3) CCW node indices
    edges: np.ndarray            # (Nj, 2) endpoints, ordered as traversed by l(j)
    S: np.ndarray                # (Ni, 3) edge index per local triangle edge
    left_of: np.ndarray          # (Nj,)
    right_of: np.ndarray         # (Nj,) -1 on boundary
    is_boundary_edge: np.ndarray # (Nj,) bool
    normals: np.ndarray          # (Nj, 2) unit n_j, left -> right
    edge_lengths: np.ndarray     # (Nj,) straight chord lengths
    areas: np.ndarray            # (Ni,) signed (positive) areas
    barycenters: np.ndarray      # (Ni, 2) vertex averages
    edge_tags: np.ndarray = field(default=None)  # (Nj,) optional integer tags

    @property
    def n_tri(self) -> int:
        return len(self.tris)

    @property
    def n_edge(self) -> int:
        return len(self.edges)

    @property
    def boundary_edges(self) -> np.ndarray:
        return np.flatnonzero(self.is_boundary_edge)

    def neighbor(self, i: int, j: int) -> int:
        """Triangle across edge j from triangle i (the paper's neighbor map)."""
        if self.left_of[j] == i:
            return int(self.right_of[j])
        if self.right_of[j] == i:
            return int(self.left_of[j])
        raise ValueError(f"triangle {i} is not incident to edge {j}")

    def sigma(self, i: int, j: int) -> float:
        """Sign function: +1 if i is the left triangle of j, -1 if the right."""
        l, r = int(self.left_of[j]), int(self.right_of[j])
        if r < 0:
            if i == l:
                return 1.0
            raise ValueError(f"triangle {i} is not incident to boundary edge {j}")
        if i not in (l, r):
            raise ValueError(f"triangle {i} is not incident to edge {j}")
        return (r - 2 * i + l) / (r - l)

    def outward_normal(self, i: int, j: int) -> np.ndarray:
        """n_ij = sigma(i,j) * n_j."""
        return self.sigma(i, j) * self.normals[j]


def build_primal(nodes: np.ndarray, tri_conn: np.ndarray,
                 edge_tags: dict | None = None) -> PrimalMesh:
    """Build the primal mesh with full connectivity from raw arrays.

    Clockwise triangles are silently reoriented; non-conforming input and
    degenerate triangles are rejected.
    """
    nodes = np.asarray(nodes, dtype=float)
    tris = np.array(tri_conn, dtype=int)
    if not np.all(np.isfinite(nodes)):
        raise MeshError("node coordinates must be finite")
    if tris.min() < 0 or tris.max() >= len(nodes):
        raise MeshError("triangle connectivity references unknown nodes")

    p0, p1, p2 = nodes[tris[:, 0]], nodes[tris[:, 1]], nodes[tris[:, 2]]
    area2 = (p1[:, 0] - p0[:, 0]) * (p2[:, 1] - p0[:, 1]) \
        - (p1[:, 1] - p0[:, 1]) * (p2[:, 0] - p0[:, 0])
    scale = np.max(np.abs(nodes)) if len(nodes) else 1.0
    bad = np.flatnonzero(np.abs(area2) < 1e-14 * max(scale, 1.0) ** 2)
    if len(bad):
        raise MeshError(f"zero-area triangle at index {bad[0]}")
    cw = area2 < 0
    tris[cw] = tris[cw][:, ::-1]

    # undirected edge table; record the triangle that traverses each direction
    edge_id: dict[tuple[int, int], int] = {}
    incidence: list[list[tuple[int, tuple[int, int]]]] = []
    directed = []
    S = np.empty((len(tris), 3), dtype=int)
    for i, (a, b, c) in enumerate(tris):
        for loc, (u, v) in enumerate(((a, b), (b, c), (c, a))):
            key = (min(u, v), max(u, v))
            j = edge_id.get(key)
            if j is None:
                j = len(directed)
                edge_id[key] = j
                directed.append((u, v))
                incidence.append([])
            incidence[j].append((i, (u, v)))
            S[i, loc] = j

    n_edge = len(directed)
    left_of = np.full(n_edge, -1, dtype=int)
    right_of = np.full(n_edge, -1, dtype=int)
    edges = np.empty((n_edge, 2), dtype=int)
    for j, inc in enumerate(incidence):
        if len(inc) > 2:
            u, v = directed[j]
            raise MeshError(f"non-conforming mesh: edge ({u},{v}) has "
                            f"{len(inc)} incident triangles")
        if len(inc) == 1:
            left_of[j] = inc[0][0]
            edges[j] = inc[0][1]
        else:
            (i1, d1), (i2, d2) = inc
            if d1 == d2:
                u, v = directed[j]
                raise MeshError(f"non-conforming orientation at edge ({u},{v})")
            l, r = (i1, i2) if i1 < i2 else (i2, i1)
            left_of[j], right_of[j] = l, r
            edges[j] = d1 if i1 == l else d2

    is_bnd = right_of < 0
    t = nodes[edges[:, 1]] - nodes[edges[:, 0]]
    lengths = np.hypot(t[:, 0], t[:, 1])
    normals = np.column_stack([t[:, 1], -t[:, 0]]) / lengths[:, None]

    bary = nodes[tris].mean(axis=1)
    areas = 0.5 * np.abs(area2)

    tags = np.zeros(n_edge, dtype=int)
    if edge_tags:
        for (u, v), tag in edge_tags.items():
            key = (min(u, v), max(u, v))
            if key in edge_id:
                tags[edge_id[key]] = tag

    return PrimalMesh(nodes=nodes, tris=tris, edges=edges, S=S,
                      left_of=left_of, right_of=right_of,
                      is_boundary_edge=is_bnd, normals=normals,
                      edge_lengths=lengths, areas=areas, barycenters=bary,
                      edge_tags=tags)


# ---------------------------------------------------------------------------
# dual grid
# ---------------------------------------------------------------------------

def _poly_area(verts: np.ndarray) -> np.ndarray:
    """Shoelace area of polygons, verts (..., nv, 2)."""
    x, y = verts[..., 0], verts[..., 1]
    xn, yn = np.roll(x, -1, axis=-1), np.roll(y, -1, axis=-1)
    return 0.5 * np.abs(np.sum(x * yn - xn * y, axis=-1))


def _chebyshev_radius(verts: np.ndarray) -> float:
    """Radius of the largest inscribed circle of a convex polygon."""
    nv = len(verts)
    a = np.roll(verts, -1, axis=0) - verts
    ln = np.hypot(a[:, 0], a[:, 1])
    # inward normal of a CCW polygon edge
    nin = np.column_stack([-a[:, 1], a[:, 0]]) / ln[:, None]
    # maximize r s.t. nin . x - r >= nin . v  =>  linprog minimizes -r
    A_ub = np.column_stack([-nin, np.ones(nv)])
    b_ub = -np.sum(nin * verts, axis=1)
    res = linprog(c=[0.0, 0.0, -1.0], A_ub=A_ub, b_ub=b_ub,
                  bounds=[(None, None), (None, None), (0, None)],
                  method="highs")
    if not res.success:
        raise MeshError("failed to compute inscribed circle of dual element")
    return float(res.x[2])


@dataclass
class DualGrid:
    """Edge-based dual control volumes and their face connectivity."""

    mesh: PrimalMesh
    verts: list                  # per edge: (4,2) quad or (3,2) triangle vertices
    areas: np.ndarray            # (Nj,)
    incircle_radius: np.ndarray  # (Nj,)
    # internal dual faces (barycenter-to-node segments)
    face_left: np.ndarray        # (F,) dual element (= edge) index left of n_l
    face_right: np.ndarray       # (F,)
    face_seg: np.ndarray         # (F, 2, 2) segment endpoints
    face_normal: np.ndarray      # (F, 2) unit, left -> right
    face_length: np.ndarray      # (F,)

    @property
    def n_dual(self) -> int:
        return self.mesh.n_edge


def build_dual(mesh: PrimalMesh) -> DualGrid:
    """Build the dual grid of a primal mesh (straight-sided geometry)."""
    nodes, bary = mesh.nodes, mesh.barycenters
    verts = []
    areas = np.empty(mesh.n_edge)
    radius = np.empty(mesh.n_edge)
    for j in range(mesh.n_edge):
        a, b = mesh.edges[j]
        l = mesh.left_of[j]
        if mesh.is_boundary_edge[j]:
            v = np.array([bary[l], nodes[a], nodes[b]])
        else:
            r = mesh.right_of[j]
            v = np.array([bary[l], nodes[a], bary[r], nodes[b]])
        A = _poly_area(v)
        if A < 1e-14:
            raise MeshError(f"degenerate dual element at edge {j}")
        # orientation check: CCW starting from the left barycenter
        x, y = v[:, 0], v[:, 1]
        signed = 0.5 * np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y)
        if signed < 0:
            raise MeshError(f"dual element at edge {j} is not counter-clockwise")
        verts.append(v)
        areas[j] = A
        radius[j] = _chebyshev_radius(v)

    # internal faces: one per (triangle, vertex) pair, separating the dual
    # elements of the two triangle edges meeting at that vertex
    fl, fr, seg, nrm, ln = [], [], [], [], []
    for i in range(mesh.n_tri):
        tri = mesh.tris[i]
        for v in tri:
            adj = [j for j in mesh.S[i] if v in mesh.edges[j]]
            if len(adj) != 2:
                raise MeshError(f"broken incidence at triangle {i}, node {v}")
            j1, j2 = adj
            t = nodes[v] - bary[i]
            L = float(np.hypot(*t))
            if L < 1e-15:
                raise MeshError(f"degenerate dual face in triangle {i}")
            n = np.array([t[1], -t[0]]) / L
            # sub-element centroids decide the left/right side
            c1 = _subelem_centroid(mesh, i, j1)
            if np.dot(n, c1 - bary[i]) < 0.0:
                left, right = j1, j2
            else:
                left, right = j2, j1
            fl.append(left)
            fr.append(right)
            seg.append(np.array([bary[i], nodes[v]]))
            nrm.append(n)
            ln.append(L)

    return DualGrid(mesh=mesh, verts=verts, areas=areas, incircle_radius=radius,
                    face_left=np.array(fl), face_right=np.array(fr),
                    face_seg=np.array(seg), face_normal=np.array(nrm),
                    face_length=np.array(ln))


def subelement_vertices(mesh: PrimalMesh, i: int, j: int) -> np.ndarray:
    """Vertices (3, 2) of T_{i,j} = R_j intersected with triangle i (CCW)."""
    a, b = mesh.edges[j]
    if mesh.sigma(i, j) > 0:
        return np.array([mesh.barycenters[i], mesh.nodes[a], mesh.nodes[b]])
    # seen from the right triangle the edge runs the other way
    return np.array([mesh.barycenters[i], mesh.nodes[b], mesh.nodes[a]])


def _subelem_centroid(mesh: PrimalMesh, i: int, j: int) -> np.ndarray:
    return subelement_vertices(mesh, i, j).mean(axis=0)


# ---------------------------------------------------------------------------
# ASCII mesh files
# ---------------------------------------------------------------------------

def read_mesh(path) -> PrimalMesh:
    """Read `N_nodes N_triangles`, node lines `x y`, 1-based triangle lines."""
    with open(path) as f:
        toks = f.read().split()
    nn, nt = int(toks[0]), int(toks[1])
    vals = np.array(toks[2:2 + 2 * nn], dtype=float).reshape(nn, 2)
    conn = np.array(toks[2 + 2 * nn:2 + 2 * nn + 3 * nt], dtype=int).reshape(nt, 3) - 1
    return build_primal(vals, conn)


def write_mesh(path, mesh: PrimalMesh) -> None:
    with open(path, "w") as f:
        f.write(f"{len(mesh.nodes)} {mesh.n_tri}\n")
        for x, y in mesh.nodes:
            f.write(f"{float(x)!r} {float(y)!r}\n")
        for t in mesh.tris:
            f.write(f"{t[0] + 1} {t[1] + 1} {t[2] + 1}\n")
