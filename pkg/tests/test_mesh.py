import numpy as np
import pytest

from stagdg import mesh as meshmod
from stagdg.generators import annulus_mesh, cavity_mesh, rectangle_mesh


def test_primal_connectivity_invariants(small_mesh):
    m = small_mesh
    assert m.tris.shape[1] == 3
    # CCW orientation: positive areas
    assert (m.areas > 0).all()
    # each edge's endpoints appear in the left triangle, traversal order
    for j in range(m.n_edge):
        tri = m.tris[m.left_of[j]]
        a, b = m.edges[j]
        k = list(tri).index(a)
        assert tri[(k + 1) % 3] == b
    # interior edges are shared by exactly the recorded pair
    for j in np.flatnonzero(~m.is_boundary_edge):
        l, r = m.left_of[j], m.right_of[j]
        shared = set(m.tris[l]) & set(m.tris[r])
        assert shared == set(m.edges[j])
    # boundary edges have no right triangle
    assert (m.right_of[m.boundary_edges] == -1).all()


def test_normals_point_left_to_right(small_mesh):
    m = small_mesh
    for j in range(m.n_edge):
        mid = m.nodes[m.edges[j]].mean(axis=0)
        bl = m.barycenters[m.left_of[j]]
        assert np.dot(m.normals[j], mid - bl) > 0
        assert abs(np.linalg.norm(m.normals[j]) - 1) < 1e-12


def test_neighbor_and_sigma(small_mesh):
    m = small_mesh
    j = int(np.flatnonzero(~m.is_boundary_edge)[0])
    l, r = m.left_of[j], m.right_of[j]
    assert m.neighbor(l, j) == r
    assert m.neighbor(r, j) == l
    assert m.sigma(l, j) == 1.0
    assert m.sigma(r, j) == -1.0


def test_dual_partitions_area(small_mesh):
    m = small_mesh
    dual = meshmod.build_dual(m)
    assert dual.n_dual == m.n_edge
    # dual control volumes tile the domain
    total = 0.0
    for j in range(m.n_edge):
        a, b = m.nodes[m.edges[j]]
        bl = m.barycenters[m.left_of[j]]
        if m.is_boundary_edge[j]:
            verts = np.array([bl, a, b])
        else:
            br = m.barycenters[m.right_of[j]]
            verts = np.array([bl, a, br, b])
        x, y = verts[:, 0], verts[:, 1]
        total += 0.5 * abs(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))
    assert abs(total - m.areas.sum()) < 1e-12 * m.areas.sum()


def test_nonconforming_input_rejected():
    nodes = np.array([[0, 0], [1, 0], [0, 1]], float)
    with pytest.raises(meshmod.MeshError):
        meshmod.build_primal(nodes, np.array([[0, 1, 1]]))


def test_generators_counts_and_tags():
    m, _, _ = cavity_mesh(6)
    assert len(m.tris) == 72
    assert set(np.unique(m.edge_tags[m.boundary_edges])) <= {1, 2}
    m, curves, _ = annulus_mesh(4, 16, 1.0, 5.0)
    assert len(m.tris) == 128
    assert curves is not None
    m, _, _ = rectangle_mesh(3, 2, 0.0, 3.0, 0.0, 2.0)
    assert len(m.tris) == 12


def test_mesh_io_roundtrip(tmp_path, small_mesh):
    path = tmp_path / "m.txt"
    meshmod.write_mesh(path, small_mesh)
    m2 = meshmod.read_mesh(path)
    assert np.allclose(m2.nodes, small_mesh.nodes)
    assert (m2.tris == small_mesh.tris).all()
