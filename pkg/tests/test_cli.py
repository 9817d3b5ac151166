"""Command-line interface: config parsing, subcommands, outputs."""

import numpy as np
import pytest

from stagdg.cli import main, parse_config_text
from stagdg.io import read_csv


def test_parse_config_text():
    cfg = parse_config_text("""
    # a comment
    case = vortex
    p = 2        # trailing comment
    t_end=0.1
    """)
    assert cfg == {"case": "vortex", "p": "2", "t_end": "0.1"}


def test_parse_config_rejects_bad_line():
    with pytest.raises(ValueError, match="line 1"):
        parse_config_text("just words")


def test_case_subcommand_writes_metrics(tmp_path):
    out = tmp_path / "run"
    rc = main(["case", "vortex", "p=1", "t_end=0.02", "--out", str(out)])
    assert rc == 0
    table, header = read_csv(f"{out}_metrics.csv")
    assert "config_hash" in header
    assert table["eps_v"][0] > 0 and table["n_tri"][0] == 128


def test_case_rejects_unknown_option(capsys):
    rc = main(["case", "vortex", "bogus=1"])
    assert rc == 2
    assert "bogus" in capsys.readouterr().err


def test_solve_subcommand_with_config(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(f"case = vortex\np = 1\nt_end = 0.02\n"
                   f"out = {tmp_path / 'sol'}\n")
    rc = main(["solve", "--config", str(cfg)])
    assert rc == 0
    table, _ = read_csv(f"{tmp_path / 'sol'}_metrics.csv")
    assert np.isfinite(table["eps_p"][0])


def test_solve_requires_known_case(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("case = nosuch\n")
    rc = main(["solve", "--config", str(cfg)])
    assert rc == 2
