"""Maps between reference and physical elements.

Every element map is stored nodally: physical control coordinates attached
to the reference lattice of a BasisSet.  Straight elements simply carry the
affine/bilinear images of the lattice, curved (isoparametric) elements carry
control nodes projected onto an analytic boundary curve.  Newton iteration
inverts the map; for straight triangles it converges in one step.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .basis import BasisSet

NEWTON_TOL = 1e-12
NEWTON_MAXIT = 30


class MapInversionError(RuntimeError):
    """Newton inversion of an element map failed (divergence or singular Jacobian)."""


# ---------------------------------------------------------------------------
# analytic boundary curves
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Circle:
    """Circle used to curve boundary edges of isoparametric meshes."""

    cx: float
    cy: float
    r: float

    def distance(self, pts: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(pts)
        return np.abs(np.hypot(pts[:, 0] - self.cx, pts[:, 1] - self.cy) - self.r)

    def project(self, pts: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        d = pts - np.array([self.cx, self.cy])
        rr = np.hypot(d[:, 0], d[:, 1])
        if np.any(rr < 1e-14):
            raise ValueError("cannot project the circle center onto the circle")
        return np.array([self.cx, self.cy]) + d * (self.r / rr)[:, None]


class CurveRegistry:
    """Registry of analytic boundary curves for curved-mesh construction."""

    def __init__(self, curves=()):
        self.curves = list(curves)

    def add(self, curve) -> None:
        self.curves.append(curve)

    def find(self, a: np.ndarray, b: np.ndarray, tol: float = 1e-9):
        """Return the curve containing both endpoints, or None."""
        pts = np.array([a, b])
        for c in self.curves:
            if np.all(c.distance(pts) <= tol * max(1.0, c.r)):
                return c
        return None


# ---------------------------------------------------------------------------
# batched nodal maps
# ---------------------------------------------------------------------------

def tri_lattice_nodes(verts: np.ndarray, basis: BasisSet) -> np.ndarray:
    """Affine images of the triangle lattice; verts (..., 3, 2) -> (..., N_phi, 2)."""
    lat = basis.tri_nodes
    lam = np.stack([1.0 - lat[:, 0] - lat[:, 1], lat[:, 0], lat[:, 1]], axis=-1)
    return np.einsum("kv,...vd->...kd", lam, np.asarray(verts, dtype=float))

def quad_lattice_nodes(verts: np.ndarray, basis: BasisSet) -> np.ndarray:
    """Bilinear images of the square lattice; verts ordered CCW (v00,v10,v11,v01)."""
    lat = basis.quad_nodes
    xi, ga = lat[:, 0], lat[:, 1]
    w = np.stack([(1 - xi) * (1 - ga), xi * (1 - ga), xi * ga, (1 - xi) * ga], axis=-1)
    return np.einsum("kv,...vd->...kd", w, np.asarray(verts, dtype=float))


class ElementMaps:
    """Nodal geometric maps for a batch of same-kind elements.

    kind is "tri" (reference T_std) or "quad" (reference R_std); X has shape
    (E, N, 2) with N matching the basis lattice of that kind.
    """

    def __init__(self, kind: str, basis: BasisSet, X: np.ndarray, mode: str = "subparametric"):
        if kind not in ("tri", "quad"):
            raise ValueError(f"unknown element kind {kind!r}")
        self.kind = kind
        self.basis = basis
        self.X = np.asarray(X, dtype=float)
        self.mode = mode
        if self.X.ndim != 3:
            raise ValueError("control nodes must have shape (E, N, 2)")

    @property
    def n_elem(self) -> int:
        return self.X.shape[0]

    def _eval(self, pts):
        return self.basis.tri_eval(pts) if self.kind == "tri" else self.basis.quad_eval(pts)

    def _grad(self, pts):
        return self.basis.tri_grad(pts) if self.kind == "tri" else self.basis.quad_grad(pts)

    def forward(self, ref: np.ndarray) -> np.ndarray:
        """Map reference points to physical space.

        ref (n, 2) applies the same points to every element -> (E, n, 2);
        ref (E, n, 2) uses per-element points.
        """
        B = self._eval(ref)
        if B.ndim == 2:
            return np.einsum("qk,ekd->eqd", B, self.X)
        return np.einsum("eqk,ekd->eqd", B, self.X)

    def jacobian(self, ref: np.ndarray) -> np.ndarray:
        """d(x,y)/d(xi,ga) at reference points -> (E, n, 2, 2)."""
        G = self._grad(ref)
        if G.ndim == 3:
            return np.einsum("qkr,ekd->eqdr", G, self.X)
        return np.einsum("eqkr,ekd->eqdr", G, self.X)

    def inverse(self, phys: np.ndarray, tol: float = NEWTON_TOL,
                max_iter: int = NEWTON_MAXIT) -> np.ndarray:
        """Newton inversion; phys (E, n, 2) -> reference (E, n, 2)."""
        phys = np.asarray(phys, dtype=float)
        E, n = phys.shape[:2]
        start = (1.0 / 3.0, 1.0 / 3.0) if self.kind == "tri" else (0.5, 0.5)
        ref = np.tile(np.array(start), (E, n, 1))
        scale = max(1.0, float(np.max(np.abs(self.X))))
        for _ in range(max_iter):
            r = self.forward(ref) - phys
            res = np.max(np.abs(r))
            if res <= tol * scale:
                return ref
            J = self.jacobian(ref)
            det = J[..., 0, 0] * J[..., 1, 1] - J[..., 0, 1] * J[..., 1, 0]
            if np.any(np.abs(det) < 1e-300):
                raise MapInversionError("singular Jacobian during map inversion")
            dx = (J[..., 1, 1] * r[..., 0] - J[..., 0, 1] * r[..., 1]) / det
            dy = (-J[..., 1, 0] * r[..., 0] + J[..., 0, 0] * r[..., 1]) / det
            ref = ref - np.stack([dx, dy], axis=-1)
        r = self.forward(ref) - phys
        raise MapInversionError(
            f"map inversion did not converge in {max_iter} iterations "
            f"(max residual {np.max(np.abs(r)):.3e})")

    def select(self, idx) -> "ElementMaps":
        return ElementMaps(self.kind, self.basis, self.X[idx], self.mode)


@dataclass
class GeometricMap:
    """Single-element view of a nodal map (spec-level convenience API)."""

    kind: str
    basis: BasisSet
    X: np.ndarray
    mode: str = "subparametric"

    def _batch(self) -> ElementMaps:
        return ElementMaps(self.kind, self.basis, self.X[None], self.mode)

    def map_to_physical(self, ref: np.ndarray) -> np.ndarray:
        ref = np.atleast_2d(np.asarray(ref, dtype=float))
        return self._batch().forward(ref)[0]

    def map_to_reference(self, phys: np.ndarray, tol: float = NEWTON_TOL,
                         max_iter: int = NEWTON_MAXIT) -> np.ndarray:
        phys = np.atleast_2d(np.asarray(phys, dtype=float))
        return self._batch().inverse(phys[None], tol, max_iter)[0]

    def jacobian(self, ref: np.ndarray) -> np.ndarray:
        ref = np.atleast_2d(np.asarray(ref, dtype=float))
        return self._batch().jacobian(ref)[0]


# ---------------------------------------------------------------------------
# whole-mesh geometry: one nodal map per primal/dual element
# ---------------------------------------------------------------------------

class MeshGeometry:
    """Nodal maps for every primal triangle and dual element of a mesh.

    The geometry basis has degree max(p, 1): sub-parametric for p = 0,
    isoparametric otherwise.  Boundary edges found in the curve registry are
    curved by projecting their lattice nodes onto the analytic curve; this
    affects the owning primal triangle, the boundary dual triangle and the
    edge trace geometry consistently (they share the projected edge nodes).
    """

    def __init__(self, mesh, p: int, curves: CurveRegistry | None = None):
        from .basis import BasisSet
        self.mesh = mesh
        self.p = p
        gb = BasisSet(max(p, 1))
        self.gbasis = gb
        curves = curves or CurveRegistry()

        mode = "isoparametric" if curves.curves else "subparametric"
        Xt = tri_lattice_nodes(mesh.nodes[mesh.tris], gb)  # (Ni, Ng_tri, 2)

        self.int_edges = np.flatnonzero(~mesh.is_boundary_edge)
        self.bnd_edges = np.flatnonzero(mesh.is_boundary_edge)

        # dual quads: (bary_l, a, bary_r, b) CCW -> bilinear corners
        qv = np.empty((len(self.int_edges), 4, 2))
        for k, j in enumerate(self.int_edges):
            a, b = mesh.edges[j]
            qv[k] = [mesh.barycenters[mesh.left_of[j]], mesh.nodes[a],
                     mesh.barycenters[mesh.right_of[j]], mesh.nodes[b]]
        Xq = quad_lattice_nodes(qv, gb)

        bv = np.empty((len(self.bnd_edges), 3, 2))
        for k, j in enumerate(self.bnd_edges):
            a, b = mesh.edges[j]
            bv[k] = [mesh.barycenters[mesh.left_of[j]], mesh.nodes[a], mesh.nodes[b]]
        Xb = tri_lattice_nodes(bv, gb)

        # straight edge trace control nodes, equispaced along the chord
        ng = gb.p + 1
        s = np.linspace(0.0, 1.0, ng)
        pa, pb = mesh.nodes[mesh.edges[:, 0]], mesh.nodes[mesh.edges[:, 1]]
        self.edge_ctrl = pa[:, None, :] * (1 - s)[None, :, None] \
            + pb[:, None, :] * s[None, :, None]
        self.curved_edge = np.zeros(mesh.n_edge, dtype=bool)

        # project curved boundary edges onto their analytic curves
        for k, j in enumerate(self.bnd_edges):
            a, b = mesh.edges[j]
            curve = curves.find(mesh.nodes[a], mesh.nodes[b])
            if curve is None or ng < 3:
                continue
            self.curved_edge[j] = True
            proj = curve.project(self.edge_ctrl[j, 1:-1])
            self.edge_ctrl[j, 1:-1] = proj
            i = mesh.left_of[j]
            loc = list(mesh.S[i]).index(j)
            Xt[i] = _project_tri_edge_nodes(Xt[i], gb, loc, self.edge_ctrl[j],
                                            mesh.tris[i], mesh.edges[j])
            # boundary dual triangle: curved side opposite local vertex 0
            Xb[k] = _set_tri_edge_nodes(Xb[k], gb, 0, self.edge_ctrl[j])

        self.tri_maps = ElementMaps("tri", gb, Xt, mode)
        self.quad_maps = ElementMaps("quad", gb, Xq, mode)
        self.bnd_maps = ElementMaps("tri", gb, Xb, mode)
        # position of each edge inside its (interior | boundary) group
        self.edge_pos = np.empty(mesh.n_edge, dtype=int)
        self.edge_pos[self.int_edges] = np.arange(len(self.int_edges))
        self.edge_pos[self.bnd_edges] = np.arange(len(self.bnd_edges))

    def edge_quadrature(self, edges: np.ndarray, s: np.ndarray, w: np.ndarray):
        """Points, outward-consistent normals and arc weights along edges.

        Returns (pts (E,n,2), normal (E,n,2), wds (E,n)) following the
        left-to-right orientation convention of n_j.
        """
        gb = self.gbasis
        L = gb.lag1d(s)                   # (n, ng)
        dL = gb.lag1d(s, deriv=True)
        ctrl = self.edge_ctrl[edges]       # (E, ng, 2)
        pts = np.einsum("qk,ekd->eqd", L, ctrl)
        tan = np.einsum("qk,ekd->eqd", dL, ctrl)
        speed = np.hypot(tan[..., 0], tan[..., 1])
        nrm = np.stack([tan[..., 1], -tan[..., 0]], axis=-1) / speed[..., None]
        return pts, nrm, speed * w[None, :]


def _tri_edge_node_mask(gb, loc: int) -> np.ndarray:
    """Lattice nodes on local edge loc (0:v0v1, 1:v1v2, 2:v2v0)."""
    lat = gb.tri_nodes
    lam = np.stack([1 - lat[:, 0] - lat[:, 1], lat[:, 0], lat[:, 1]], axis=-1)
    opposite = {0: 2, 1: 0, 2: 1}[loc]
    return lam[:, opposite] < 1e-12


def _edge_param_for_nodes(gb, loc: int, mask: np.ndarray) -> np.ndarray:
    """Arc parameter s in [0,1] of the masked lattice nodes along edge loc."""
    lat = gb.tri_nodes[mask]
    lam = np.stack([1 - lat[:, 0] - lat[:, 1], lat[:, 0], lat[:, 1]], axis=-1)
    start = {0: 0, 1: 1, 2: 2}[loc]
    return 1.0 - lam[:, start]


def _blend_curved_edge(X, gb, loc, edge_ctrl, reverse: bool = False):
    """Displace lattice nodes by the curved-edge deviation from its chord.

    The deviation is blended into the interior with weight 1 - lambda_opp
    (transfinite interpolation), which keeps strongly curved maps invertible.
    Nodes on the two straight sides project to the curve endpoints where the
    deviation vanishes, so those sides remain exactly straight and adjacent
    straight-sided elements still tile without gaps.
    """
    lat = gb.tri_nodes
    lam = np.stack([1 - lat[:, 0] - lat[:, 1], lat[:, 0], lat[:, 1]], -1)
    end = {0: 1, 1: 2, 2: 0}[loc]
    opposite = {0: 2, 1: 0, 2: 1}[loc]
    w = 1.0 - lam[:, opposite]
    s = np.where(w > 1e-14, lam[:, end] / np.where(w > 1e-14, w, 1.0), 0.5)
    if reverse:
        s = 1.0 - s
    L = gb.lag1d(s)
    chord = np.outer(1.0 - s, edge_ctrl[0]) + np.outer(s, edge_ctrl[-1])
    delta = np.einsum("qk,kd->qd", L, edge_ctrl) - chord
    return X + w[:, None] * delta


def _set_tri_edge_nodes(X, gb, opposite_vertex, edge_ctrl):
    """Curve the side opposite `opposite_vertex` (dual triangles)."""
    loc = {0: 1, 1: 2, 2: 0}[opposite_vertex]
    return _blend_curved_edge(X, gb, loc, edge_ctrl)


def _project_tri_edge_nodes(X, gb, loc, edge_ctrl, tri_nodes, edge_nodes):
    """Curve a primal triangle's local edge loc.

    edge_ctrl runs from edge_nodes[0] to edge_nodes[1]; the local edge may be
    traversed in either direction depending on l/r assignment.
    """
    locpair = {0: (0, 1), 1: (1, 2), 2: (2, 0)}[loc]
    reverse = tri_nodes[locpair[0]] != edge_nodes[0]
    return _blend_curved_edge(X, gb, loc, edge_ctrl, reverse)
