"""Mesh generators for the benchmark geometries.

Every generator returns ``(mesh, curves, tags)`` where ``tags`` maps boundary
names to the integer edge tags stored on the mesh and ``curves`` is a
CurveRegistry for curved boundaries (or None).  Boundary tags are assigned
from edge midpoints, so generators stay independent of node ordering.
"""

from __future__ import annotations

import numpy as np

from .geom import Circle, CurveRegistry
from .mesh import PrimalMesh, build_primal


def tag_boundary(mesh: PrimalMesh, tag_fn) -> None:
    """Assign mesh.edge_tags on boundary edges from their midpoints."""
    for j in mesh.boundary_edges:
        a, b = mesh.edges[j]
        mid = 0.5 * (mesh.nodes[a] + mesh.nodes[b])
        mesh.edge_tags[j] = tag_fn(mid)


def _grid_tris(nx: int, ny: int) -> np.ndarray:
    """Triangle connectivity of an (nx x ny)-cell structured grid with
    alternating diagonals (union-jack pattern avoids mesh-wide bias)."""
    idx = lambda i, j: j * (nx + 1) + i
    tris = []
    for j in range(ny):
        for i in range(nx):
            a, b = idx(i, j), idx(i + 1, j)
            c, d = idx(i + 1, j + 1), idx(i, j + 1)
            if (i + j) % 2 == 0:
                tris += [[a, b, c], [a, c, d]]
            else:
                tris += [[a, b, d], [b, c, d]]
    return np.array(tris, dtype=int)


def rectangle_mesh(nx: int, ny: int, x0: float, x1: float, y0: float, y1: float,
                   xs: np.ndarray | None = None, ys: np.ndarray | None = None):
    """Structured triangulation of [x0,x1] x [y0,y1].

    Optional xs/ys override the uniform coordinate lines (lengths nx+1/ny+1).
    Tags: left=1, right=2, bottom=3, top=4.
    """
    if xs is None:
        xs = np.linspace(x0, x1, nx + 1)
    if ys is None:
        ys = np.linspace(y0, y1, ny + 1)
    X, Y = np.meshgrid(xs, ys)
    nodes = np.column_stack([X.ravel(), Y.ravel()])
    mesh = build_primal(nodes, _grid_tris(nx, ny))
    tol = 1e-9 * max(x1 - x0, y1 - y0)

    def tag(mid):
        if abs(mid[0] - x0) < tol:
            return 1
        if abs(mid[0] - x1) < tol:
            return 2
        if abs(mid[1] - y0) < tol:
            return 3
        return 4

    tag_boundary(mesh, tag)
    return mesh, None, {"left": 1, "right": 2, "bottom": 3, "top": 4}


def cavity_mesh(n: int):
    """Unit-square cavity, 2*n^2 triangles.  Tags: walls=1, lid(top)=2."""
    mesh, _, _ = rectangle_mesh(n, n, 0.0, 1.0, 0.0, 1.0)
    tag_boundary(mesh, lambda m: 2 if abs(m[1] - 1.0) < 1e-9 else 1)
    return mesh, None, {"walls": 1, "lid": 2}


def annulus_mesh(nr: int, nt: int, r0: float = 1.0, r1: float = 2.0):
    """Annulus r0 < r < r1 with 2*nr*nt triangles and curved boundaries.

    Tags: inner=1, outer=2.
    """
    radii = np.linspace(r0, r1, nr + 1)
    theta = np.linspace(0.0, 2 * np.pi, nt, endpoint=False)
    nodes = np.concatenate([np.column_stack([r * np.cos(theta), r * np.sin(theta)])
                            for r in radii])
    idx = lambda i, j: i * nt + (j % nt)
    tris = []
    for i in range(nr):
        for j in range(nt):
            a, b = idx(i, j), idx(i, j + 1)
            c, d = idx(i + 1, j + 1), idx(i + 1, j)
            if (i + j) % 2 == 0:
                tris += [[a, b, c], [a, c, d]]
            else:
                tris += [[a, b, d], [b, c, d]]
    mesh = build_primal(nodes, np.array(tris, dtype=int))
    rm = 0.5 * (r0 + r1)
    tag_boundary(mesh, lambda m: 1 if np.hypot(*m) < rm else 2)
    curves = CurveRegistry([Circle(0.0, 0.0, r0), Circle(0.0, 0.0, r1)])
    return mesh, curves, {"inner": 1, "outer": 2}


def annulus_unstructured_mesh(level: int = 0, r0: float = 1.0,
                              r1: float = 5.0, h0: float = 1.15):
    """Quasi-uniform unstructured annulus (~125/504/2051 triangles at levels
    0/1/2 for the default radii) with curved boundaries.

    Boundary circles are sampled at the target spacing h = h0 / 2**level and
    the interior is filled with a hexagonal lattice, Delaunay-triangulated.
    Tags: inner=1, outer=2.
    """
    from scipy.spatial import Delaunay

    h = h0 / 2 ** level
    pts = []
    # at least 8 segments on the inner circle, and a slightly wider clear
    # band around it, so the curved boundary duals stay invertible
    for r, m_min in ((r0, 8), (r1, 8)):
        m = max(m_min, int(round(2.0 * np.pi * r / h)))
        th = np.linspace(0.0, 2.0 * np.pi, m, endpoint=False)
        pts.append(np.column_stack([r * np.cos(th), r * np.sin(th)]))
    dy = h * np.sqrt(3.0) / 2.0
    for k, y in enumerate(np.arange(-r1, r1 + dy, dy)):
        xs = np.arange(-r1, r1 + h, h) + (0.5 * h if k % 2 else 0.0)
        row = np.column_stack([xs, np.full_like(xs, y)])
        r = np.hypot(row[:, 0], row[:, 1])
        pts.append(row[(r > r0 + 0.7 * h) & (r < r1 - 0.6 * h)])
    nodes = np.concatenate(pts)
    n_fixed = len(pts[0]) + len(pts[1])

    # Laplacian/Lloyd relaxation of the interior points: without it the
    # lattice seams leave sliver triangles against the circles, and the
    # curved boundary duals built on their barycenters become nearly
    # degenerate.
    def triangulate(nd):
        tri = Delaunay(nd)
        c = nd[tri.simplices].mean(axis=1)
        rc = np.hypot(c[:, 0], c[:, 1])
        return tri.simplices[(rc > r0) & (rc < r1)]

    for _ in range(30):
        simp = triangulate(nodes)
        acc = np.zeros_like(nodes)
        cnt = np.zeros(len(nodes))
        for a, b in ((0, 1), (1, 2), (2, 0)):
            np.add.at(acc, simp[:, a], nodes[simp[:, b]])
            np.add.at(cnt, simp[:, a], 1.0)
            np.add.at(acc, simp[:, b], nodes[simp[:, a]])
            np.add.at(cnt, simp[:, b], 1.0)
        new = acc / cnt[:, None]
        r = np.hypot(new[:, 0], new[:, 1])
        np.clip(r, r0 + 0.45 * h, r1 - 0.45 * h, out=r)
        scale = r / np.hypot(new[:, 0], new[:, 1])
        new *= scale[:, None]
        nodes[n_fixed:] = new[n_fixed:]

    mesh = build_primal(nodes, triangulate(nodes))
    rm = 0.5 * (r0 + r1)
    tag_boundary(mesh, lambda m: 1 if np.hypot(*m) < rm else 2)
    curves = CurveRegistry([Circle(0.0, 0.0, r0), Circle(0.0, 0.0, r1)])
    return mesh, curves, {"inner": 1, "outer": 2}


def graded_points(a: float, b: float, n: int, beta: float = 2.0,
                  side: str = "both") -> np.ndarray:
    """n+1 points on [a, b] clustered by a tanh stretch (beta = strength).

    side: 'both' clusters at both ends, 'start'/'end' at one end only.
    """
    s = np.linspace(0.0, 1.0, n + 1)
    if side == "both":
        g = 0.5 * (1.0 + np.tanh(beta * (2 * s - 1)) / np.tanh(beta))
    elif side == "start":
        g = 1.0 + np.tanh(beta * (s - 1)) / np.tanh(beta)
    elif side == "end":
        g = np.tanh(beta * s) / np.tanh(beta)
    else:
        raise ValueError(f"unknown side {side!r}")
    return a + (b - a) * g


def channel_strip_mesh(nx: int, ny: int, length: float = 1.5, x0: float = -0.5,
                       half_height: float = 0.2, beta: float = 1.8):
    """Channel |y| < half_height with wall-clustered rows for oscillatory flow.

    Tags: inlet(left)=1, outlet(right)=2, walls=3.
    """
    ys = graded_points(-half_height, half_height, ny, beta=beta, side="both")
    mesh, _, _ = rectangle_mesh(nx, ny, x0, x0 + length, -half_height,
                                half_height, ys=ys)
    eps = 1e-9

    def tag(m):
        if abs(m[0] - x0) < eps:
            return 1
        if abs(m[0] - (x0 + length)) < eps:
            return 2
        return 3

    tag_boundary(mesh, tag)
    return mesh, None, {"inlet": 1, "outlet": 2, "walls": 3}


def flat_plate_mesh(nx_lead: int = 4, nx_plate: int = 14, ny: int = 9,
                    x_in: float = -0.1, x_out: float = 0.35,
                    height: float = 0.12, beta: float = 2.2):
    """Boundary-layer box with the plate on y=0, x>=0.

    Tags: inflow=1, outflow=2, symmetry(ahead of plate)=3, plate=4, top=5.
    """
    xs = np.concatenate([np.linspace(x_in, 0.0, nx_lead + 1)[:-1],
                         graded_points(0.0, x_out, nx_plate, beta=1.2, side="start")])
    ys = graded_points(0.0, height, ny, beta=beta, side="start")
    nx = len(xs) - 1
    mesh, _, _ = rectangle_mesh(nx, ny, x_in, x_out, 0.0, height, xs=xs, ys=ys)
    eps = 1e-9

    def tag(m):
        if abs(m[0] - x_in) < eps:
            return 1
        if abs(m[0] - x_out) < eps:
            return 2
        if abs(m[1]) < eps:
            return 3 if m[0] < 0.0 else 4
        return 5

    tag_boundary(mesh, tag)
    return mesh, None, {"inflow": 1, "outflow": 2, "symmetry": 3,
                        "plate": 4, "top": 5}


def backward_step_mesh(h_cells: int = 4, length_in: float = 2.0,
                       length_out: float = 18.0, step: float = 0.5):
    """Backward-facing step: inlet channel of height (1-step) expands to 1.

    The step corner sits at (0, step).  Tags: inflow=1, outflow=2, walls=3.
    """
    hy = step / h_cells                      # target cell size
    ny_low = h_cells
    ny_up = max(1, round((1.0 - step) / hy))
    nx_in = max(2, round(length_in / hy / 2))
    xs_out = graded_points(0.0, length_out, max(8, round(length_out / hy / 2.5)),
                           beta=1.6, side="start")
    xs = np.concatenate([np.linspace(-length_in, 0.0, nx_in + 1)[:-1], xs_out])
    ys = np.concatenate([np.linspace(0.0, step, ny_low + 1)[:-1],
                         np.linspace(step, 1.0, ny_up + 1)])
    nx, ny = len(xs) - 1, len(ys) - 1
    X, Y = np.meshgrid(xs, ys)
    nodes = np.column_stack([X.ravel(), Y.ravel()])
    tris = _grid_tris(nx, ny)
    # drop cells in the solid block x<0, y<step
    cx = nodes[tris].mean(axis=1)
    keep = ~((cx[:, 0] < -1e-12) & (cx[:, 1] < step - 1e-12))
    tris = tris[keep]
    used = np.unique(tris)
    remap = -np.ones(len(nodes), dtype=int)
    remap[used] = np.arange(len(used))
    mesh = build_primal(nodes[used], remap[tris])
    eps = 1e-9

    def tag(m):
        if abs(m[0] + length_in) < eps:
            return 1
        if abs(m[0] - length_out) < eps:
            return 2
        return 3

    tag_boundary(mesh, tag)
    return mesh, None, {"inflow": 1, "outflow": 2, "walls": 3}


def cylinder_box_mesh(radius: float = 1.0, half_width: float = 15.0,
                      length_up: float = 15.0, length_down: float = 35.0,
                      n_ring: int = 36, n_layers: int = 6,
                      layer_growth: float = 1.45, h_far: float = 2.4):
    """Cylinder of given radius at the origin inside a rectangular box.

    Structured rings grade away from the cylinder; the far field is a
    Delaunay triangulation of a uniform point cloud.  Curved edges on the
    cylinder carry a circle registry.  Tags: inflow=1, outflow=2, sides=3,
    cylinder=4.
    """
    from scipy.spatial import Delaunay

    pts = []
    r = radius
    dr = 2 * np.pi * radius / n_ring
    ring_r = [r]
    for _ in range(n_layers):
        r = r + dr
        ring_r.append(r)
        dr *= layer_growth
    for k, rr in enumerate(ring_r):
        th = np.linspace(0, 2 * np.pi, n_ring, endpoint=False)
        th += (k % 2) * np.pi / n_ring
        pts.append(np.column_stack([rr * np.cos(th), rr * np.sin(th)]))
    r_out = ring_r[-1]

    x0, x1 = -length_up, length_down
    y0, y1 = -half_width, half_width
    nxf = round((x1 - x0) / h_far)
    nyf = round((y1 - y0) / h_far)
    xs = np.linspace(x0, x1, nxf + 1)
    ys = np.linspace(y0, y1, nyf + 1)
    X, Y = np.meshgrid(xs, ys)
    far = np.column_stack([X.ravel(), Y.ravel()])
    far = far[np.hypot(far[:, 0], far[:, 1]) > r_out + 0.45 * h_far]
    pts.append(far)
    nodes = np.concatenate(pts)

    tri = Delaunay(nodes)
    cx = nodes[tri.simplices].mean(axis=1)
    keep = np.hypot(cx[:, 0], cx[:, 1]) > radius * 1.0001
    # drop slivers hugging the hole
    conn = tri.simplices[keep]
    v = nodes[conn]
    a2 = np.abs((v[:, 1, 0] - v[:, 0, 0]) * (v[:, 2, 1] - v[:, 0, 1])
                - (v[:, 1, 1] - v[:, 0, 1]) * (v[:, 2, 0] - v[:, 0, 0]))
    conn = conn[a2 > 1e-10 * a2.max()]
    mesh = build_primal(nodes, conn)
    eps = 1e-6

    def tag(m):
        if abs(m[0] - x0) < eps:
            return 1
        if abs(m[0] - x1) < eps:
            return 2
        if abs(m[1] - y0) < eps or abs(m[1] - y1) < eps:
            return 3
        return 4

    tag_boundary(mesh, tag)
    curves = CurveRegistry([Circle(0.0, 0.0, radius)])
    return mesh, curves, {"inflow": 1, "outflow": 2, "sides": 3, "cylinder": 4}
