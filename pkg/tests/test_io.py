"""Writers: VTK snapshots, CSV tables, checkpoints, config hashing."""

import numpy as np

from stagdg import mesh as meshmod
from stagdg.generators import cavity_mesh
from stagdg.io import (config_hash, load_checkpoint, read_csv,
                       sample_fields, save_checkpoint, write_csv, write_vtk)
from stagdg.operators import assemble_operators
from stagdg.stepper import interpolate_state


def _small_ops(p=1):
    mesh = cavity_mesh(2)[0]
    dual = meshmod.build_dual(mesh)
    return assemble_operators(mesh, dual, p)


def test_sample_fields_constant_state():
    ops = _small_ops()
    s = interpolate_state(ops, lambda x, y: (0.6 * np.ones_like(x),
                                             -0.2 * np.ones_like(x)),
                          lambda x, y: 3.0 * np.ones_like(x))
    pts, cells, data = sample_fields(ops, s.P, s.V)
    assert cells.min() == 0 and cells.max() == len(pts) - 1
    assert np.allclose(data["p"], 3.0, atol=1e-10)
    assert np.allclose(data["u"], 0.6, atol=1e-10)
    assert np.allclose(data["v"], -0.2, atol=1e-10)
    assert np.allclose(data["vorticity"], 0.0, atol=1e-8)


def test_write_vtk_structure(tmp_path):
    ops = _small_ops()
    s = interpolate_state(ops, lambda x, y: (x, -y), lambda x, y: x * y)
    path = tmp_path / "out.vtk"
    write_vtk(path, ops, s.P, s.V)
    lines = path.read_text().splitlines()
    assert lines[0].startswith("# vtk DataFile")
    npts = int(next(l for l in lines if l.startswith("POINTS")).split()[1])
    ncell = int(next(l for l in lines if l.startswith("CELLS")).split()[1])
    assert npts > 0 and ncell > 0
    assert sum(l.startswith("SCALARS") for l in lines) == 4
    assert any(l.startswith("VECTORS velocity") for l in lines)


def test_csv_roundtrip(tmp_path):
    path = tmp_path / "table.csv"
    cols = {"x": np.linspace(0, 1, 5), "f": np.arange(5.0) ** 2}
    write_csv(path, cols, header={"tol": "1e-8", "case": "demo"})
    back, header = read_csv(path)
    assert header["tol"] == "1e-8" and header["case"] == "demo"
    for k in cols:
        assert np.allclose(back[k], cols[k])


def test_checkpoint_roundtrip(tmp_path):
    rng = np.random.default_rng(7)
    P = rng.standard_normal((10, 6))
    V = rng.standard_normal((25, 9, 2))
    path = tmp_path / "state.chk"
    save_checkpoint(path, 1.25, P, V, p_degree=2)
    t, P2, V2, pd = load_checkpoint(path)
    assert t == 1.25 and pd == 2
    assert np.array_equal(P, P2) and np.array_equal(V, V2)


def test_checkpoint_rejects_other_files(tmp_path):
    path = tmp_path / "junk.bin"
    path.write_bytes(b"not a checkpoint at all")
    import pytest
    with pytest.raises(ValueError):
        load_checkpoint(path)


def test_config_hash_stable_and_order_independent():
    a = config_hash({"p": 2, "case": "vortex"})
    b = config_hash({"case": "vortex", "p": 2})
    c = config_hash({"case": "vortex", "p": 3})
    assert a == b and a != c and len(a) == 12
