import numpy as np
import pytest


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240817)


def random_delaunay_mesh(rng, n_interior=12, seed_box=1.0):
    """A small unstructured triangulation of the unit square."""
    from scipy.spatial import Delaunay

    from stagdg import mesh as meshmod

    corners = np.array([[0, 0], [1, 0], [1, 1], [0, 1]], float) * seed_box
    edge = np.linspace(0.0, seed_box, 4)[1:-1]
    band = np.concatenate([
        np.column_stack([edge, np.zeros_like(edge)]),
        np.column_stack([edge, np.full_like(edge, seed_box)]),
        np.column_stack([np.zeros_like(edge), edge]),
        np.column_stack([np.full_like(edge, seed_box), edge])])
    inner = rng.uniform(0.15 * seed_box, 0.85 * seed_box, (n_interior, 2))
    nodes = np.concatenate([corners, band, inner])
    tri = Delaunay(nodes)
    return meshmod.build_primal(nodes, tri.simplices)


@pytest.fixture(scope="session")
def small_mesh(rng):
    return random_delaunay_mesh(rng)
