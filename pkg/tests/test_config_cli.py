import json
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from metaori import cli
from metaori.config import (PRESETS, parse_config, preset_config, run_sweep,
                            sweep_csv)
from metaori.errors import BadPath, InvariantError, SchemaError


def test_minimal_preset_document_expands():
    cfg = parse_config('{"schema": 1, "preset": "paper"}')
    m = cfg.metashell
    assert (m.c, m.l, m.t, m.h) == (12.50, 22.50, 1.25, 9.40)
    assert (m.r, m.delta, m.wall_height) == (7.60, 0.63, 12.5)
    assert (m.rows, m.cols) == (1, 4)


def test_biseg_preset_infills():
    cfg = preset_config("paper-biseg")
    assert cfg.metashell.rows == 2
    assert cfg.metashell.infill_per_row == (0.99, 0.60)
    assert [s.infill for s in cfg.segments] == [0.99, 0.60]


def test_theta_out_of_range():
    doc = {"schema": 1, "preset": "paper", "kresling": {"theta_deg": 190.0}}
    with pytest.raises(InvariantError):
        parse_config(doc)


def test_unknown_key_schema_error_with_pointer():
    with pytest.raises(SchemaError) as ei:
        parse_config('{"schema": 1, "colour": "red"}')
    assert ei.value.pointer in ("", "/colour") or "colour" in str(ei.value)


def test_nested_unknown_key_pointer():
    with pytest.raises(SchemaError) as ei:
        parse_config({"schema": 1, "metashell": {"hh": 3}})
    assert "/metashell" in ei.value.pointer or "hh" in str(ei.value)


def test_nonfinite_rejected():
    from metaori.errors import UnitError
    with pytest.raises(UnitError):
        parse_config('{"schema": 1, "metashell": {"h": NaN}}')


def test_config_roundtrip_fixed_point():
    cfg = preset_config("paper")
    text = cfg.serialize()
    cfg2 = parse_config(text)
    assert cfg2.serialize() == text


def test_sweep_h_rows():
    cfg = preset_config("paper")
    rows = run_sweep(cfg, "metashell.h", [4.7, 9.4, 14.1])
    assert len(rows) == 3
    # h = 14.1 overflows the (l+c)/2 row height: reported per-row, not fatal
    assert rows[0]["error"] == "" and rows[1]["error"] == ""
    assert rows[2]["error"] != ""
    flags = [int(r["bistable"]) for r in rows if r["bistable"] is not None]
    assert flags == sorted(flags)  # monotone non-decreasing in h
    csv = sweep_csv(rows)
    assert csv.splitlines()[0] == "value,bistable,snap_pressure_mbar,elongation_pct,error"


def test_sweep_empty_values():
    cfg = preset_config("paper")
    rows = run_sweep(cfg, "metashell.h", [])
    assert rows == []
    assert sweep_csv(rows).strip() == "value,bistable,snap_pressure_mbar,elongation_pct,error"


def test_sweep_bad_path():
    cfg = preset_config("paper")
    with pytest.raises(BadPath):
        run_sweep(cfg, "kresling.chirality", [1.0])
    with pytest.raises(BadPath):
        run_sweep(cfg, "nope.h", [1.0])


def test_sweep_row_errors_do_not_abort():
    cfg = preset_config("paper")
    rows = run_sweep(cfg, "metashell.t", [1.25, 50.0])
    assert rows[0]["error"] == ""
    assert rows[1]["error"] != ""


# --- CLI ------------------------------------------------------------------------

def run_cli(*args):
    return cli.main(list(args))


def test_cli_validate_preset(capsys):
    assert run_cli("validate", "--preset", "paper") == 0
    out = capsys.readouterr().out
    assert "config valid" in out


def test_cli_validate_bad_config(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"schema": 1, "colour": "red"}')
    assert run_cli("validate", "--config", str(bad)) == 1


def test_cli_missing_file_is_io_error():
    assert run_cli("validate", "--config", "/nonexistent/x.json") == 3


def test_cli_curves_writes_outputs(tmp_path):
    out = tmp_path / "curves"
    assert run_cli("curves", "--preset", "paper", "--out", str(out)) == 0
    for name in ("fd_meta.csv", "fd_ori.csv", "fd_combined.csv", "pv.csv",
                 "events.txt", "fd.png", "pv.png"):
        assert (out / name).exists(), name
    header = (out / "pv.csv").read_text().splitlines()[0]
    assert header == "V_mL,P_mbar"
    assert (out / "fd_meta.csv").read_text().splitlines()[0] == "d_mm,F_N"


def test_cli_generate_and_validate_roundtrip(tmp_path):
    out = tmp_path / "gen"
    assert run_cli("generate", "--preset", "paper", "--out", str(out),
                   "--no-validate") == 0
    stl = out / "meta_ori.stl"
    assert stl.exists()
    assert (out / "config.json").exists()
    assert run_cli("validate", "--mesh", str(stl), "--fast") == 0


def test_cli_sweep(tmp_path):
    out = tmp_path / "sweep"
    rc = run_cli("sweep", "--preset", "paper", "--axis", "metashell.h",
                 "--values", "9.4", "--out", str(out))
    assert rc == 0
    assert (out / "sweep.csv").exists()
    assert (out / "sweep.png").exists()


def test_cli_sequence_requires_segments(tmp_path):
    assert run_cli("sequence", "--preset", "paper",
                   "--out", str(tmp_path / "s")) == 1


def test_cli_exit_code_classification():
    from metaori import errors as err
    assert cli.classify(err.SchemaError("x")) == 1
    assert cli.classify(err.NotBistable("x")) == 2
    assert cli.classify(err.TruncatedFile("x")) == 3
    assert cli.classify(OSError("x")) == 3
