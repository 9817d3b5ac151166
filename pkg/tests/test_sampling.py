"""Point evaluation of discrete fields at arbitrary locations."""

import numpy as np
import pytest

from stagdg import mesh as meshmod
from stagdg.generators import annulus_mesh, cavity_mesh
from stagdg.operators import assemble_operators
from stagdg.sampling import evaluate_pressure, evaluate_velocity, locate_points
from stagdg.stepper import interpolate_state


def _ops(curved: bool, p: int):
    if curved:
        mesh, curves, _ = annulus_mesh(2, 16, 1.0, 2.0)
    else:
        mesh, curves = cavity_mesh(3)[0], None
    dual = meshmod.build_dual(mesh)
    return assemble_operators(mesh, dual, p, curves)


def _interior_points(ops, rng, n=60):
    """Random points strictly inside the mesh (barycentric blend)."""
    mesh = ops.mesh
    tri = rng.integers(0, len(mesh.tris), n)
    lam = rng.dirichlet((2.0, 2.0, 2.0), n)
    return np.einsum("nv,nvd->nd", lam, mesh.nodes[mesh.tris[tri]])


@pytest.mark.parametrize("curved", [False, True])
def test_linear_fields_reproduced(curved, rng):
    ops = _ops(curved, p=2)
    vel = lambda x, y: (0.3 * x - 1.1 * y + 0.5, 0.7 * x + 0.2 * y - 0.4)
    pres = lambda x, y: 1.5 * x - 0.8 * y + 0.25
    s = interpolate_state(ops, vel, pres)
    pts = _interior_points(ops, rng)
    ph = evaluate_pressure(ops, s.P, pts)
    vh = evaluate_velocity(ops, s.V, pts)
    assert np.allclose(ph, pres(pts[:, 0], pts[:, 1]), atol=1e-10)
    assert np.allclose(vh, np.stack(vel(pts[:, 0], pts[:, 1]), -1), atol=1e-8)


def test_locate_points_rejects_outside():
    ops = _ops(False, p=1)
    with pytest.raises(ValueError, match="outside"):
        locate_points(ops, np.array([[2.5, 0.5]]))


def test_locate_points_containment(rng):
    ops = _ops(False, p=1)
    pts = _interior_points(ops, rng, 40)
    tri, ref = locate_points(ops, pts)
    lam = np.stack([1 - ref[:, 0] - ref[:, 1], ref[:, 0], ref[:, 1]], -1)
    assert (lam > -1e-9).all()
    back = np.einsum("nv,nvd->nd",
                     np.stack([1 - ref[:, 0] - ref[:, 1],
                               ref[:, 0], ref[:, 1]], -1),
                     ops.mesh.nodes[ops.mesh.tris[tri]])
    assert np.allclose(back, pts, atol=1e-9)
