from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import pytest

from xyqfim import cli, estimation, models

GOLDEN = Path(__file__).parent / "golden"


def run(args, capsys):
    code = cli.main(args)
    return code, capsys.readouterr()


def read_csv(text):
    rows = list(csv.reader(text.splitlines()))
    return rows[0], rows[1:]


def cell_close(a: str, b: str, tol: float = 1e-10) -> bool:
    if a == b:
        return True
    try:
        x, y = float(a), float(b)
    except ValueError:
        return False
    if math.isnan(x) and math.isnan(y):
        return True
    return abs(x - y) <= tol * max(1.0, abs(y))


# -- argument handling ----------------------------------------------------------


def test_parse_grid_inclusive():
    assert cli.parse_grid("-2:2:1") == (-2.0, -1.0, 0.0, 1.0, 2.0)
    assert cli.parse_grid("0.05:2:0.05")[-1] == 2.0
    assert len(cli.parse_grid("0.05:2:0.05")) == 40
    assert cli.parse_grid("1:1:0.5") == (1.0,)


@pytest.mark.parametrize("spec", ["1:0:1", "0:1:0", "0:1:-1", "0:1", "a:b:c"])
def test_parse_grid_rejects(spec):
    with pytest.raises(cli.ConfigError):
        cli.parse_grid(spec)


@pytest.mark.parametrize(
    "args",
    [
        ["compute", "--model", "xy-aniso", "--gamma", "0", "--T", "-1"],
        ["compute", "--model", "xy-aniso", "--gamma", "0"],
        ["compute", "--model", "xy-aniso", "--gamma", "0", "--T", "1", "--B", "1"],
        ["compute", "--model", "xy-aniso", "--grid-gamma", "0:1:1", "--T", "1"],
        ["scan", "--model", "xy-aniso", "--gamma", "0", "--T", "1"],
        ["scan", "--model", "xy-aniso", "--grid-gamma", "1:0:1", "--T", "1"],
        ["scan", "--model", "xy-aniso", "--grid-gamma", "0:1:0", "--T", "1"],
        ["scan", "--model", "xy-aniso", "--grid-gamma", "0:1:1", "--grid-T", "-1:1:1"],
        ["check"],
        ["check", "--checks", "oracle,bogus"],
        ["compute", "--model", "heisenberg", "--T", "1"],
    ],
)
def test_config_errors_exit_2(args, capsys):
    code, _ = run(args, capsys)
    assert code == 2


def test_io_error_exit_3(tmp_path, capsys):
    target = tmp_path / "missing" / "out.csv"
    code, _ = run(["scan", "--model", "xy-aniso", "--grid-gamma", "0:1:1", "--T", "1", "-o", str(target)], capsys)
    assert code == 3


# -- compute --------------------------------------------------------------------


def test_compute_aniso_commutes(capsys):
    code, out = run(["compute", "--model", "xy-aniso", "--gamma", "1", "--T", "1"], capsys)
    assert code == 0
    rec = json.loads(out.out)
    assert rec["commute_flag"] is True
    assert set(estimation.columns(models.ANISO)) <= set(rec)
    assert set(rec["sld_eigenvalues"]) == {"gamma", "T"}
    assert "closed_form" in rec and "commutator_norms" in rec


def test_compute_iso_field_value(capsys):
    code, out = run(["compute", "--model", "xy-iso-field", "--B", "0", "--T", "1", "--J", "1"], capsys)
    assert code == 0
    assert json.loads(out.out)["F11"] == pytest.approx(0.39322, abs=5e-6)


def test_compute_negative_point_values(capsys):
    code, out = run(["compute", "--model", "xy-aniso", "--gamma", "-1.5", "--T", "0.7", "--format", "csv"], capsys)
    assert code == 0
    header, rows = read_csv(out.out)
    assert float(rows[0][header.index("gamma")]) == -1.5


def test_one_point_scan_equals_compute(capsys):
    _, a = run(["compute", "--model", "xy-iso-field", "--B", "0.3", "--T", "0.7", "--format", "csv"], capsys)
    _, b = run(["scan", "--model", "xy-iso-field", "--grid-B", "0.3:0.3:1", "--T", "0.7"], capsys)
    assert a.out == b.out


# -- scan -----------------------------------------------------------------------


SMALL_ISO = ["scan", "--model", "xy-iso-field", "--grid-B", "-1:1:0.5", "--grid-T", "0.5:1:0.25", "--J", "1"]


def test_scan_byte_identical_across_runs_and_threads(tmp_path, capsys):
    paths = [tmp_path / f"{k}.csv" for k in range(3)]
    for p, workers in zip(paths, ("1", "1", "4")):
        assert run(SMALL_ISO + ["-o", str(p), "--workers", workers], capsys)[0] == 0
    data = [p.read_bytes() for p in paths]
    assert data[0] == data[1] == data[2]
    assert b"\r" not in data[0]


@pytest.mark.parametrize(
    "golden,args",
    [
        ("scan_iso_small.csv", SMALL_ISO),
        ("scan_aniso_small.csv", ["scan", "--model", "xy-aniso", "--grid-gamma", "-1:1:1", "--grid-T", "0.4:0.8:0.4"]),
    ],
)
def test_scan_csv_matches_golden(golden, args, capsys):
    code, out = run(args, capsys)
    assert code == 0
    header, rows = read_csv(out.out)
    g_header, g_rows = read_csv((GOLDEN / golden).read_text())
    assert header == g_header
    assert header == list(estimation.columns(args[2]))
    assert len(rows) == len(g_rows)
    for r, g in zip(rows, g_rows):
        for name, a, b in zip(header, r, g):
            tol = 1e-8 if name.startswith(("delta_", "max_")) else 1e-10
            assert cell_close(a, b, tol) or (name.startswith(("delta_", "max_")) and abs(float(a)) < 1e-12), name


def test_scan_json_matches_golden(capsys):
    code, out = run(["scan", "--model", "xy-aniso", "--grid-gamma", "0:1:1", "--T", "1", "--format", "json"], capsys)
    assert code == 0
    got = json.loads(out.out)
    want = json.loads((GOLDEN / "scan_aniso_small.json").read_text())
    assert [list(r) for r in got] == [list(r) for r in want]
    for r, w in zip(got, want):
        for k in ("F11", "F12", "F22", "gamma_ratio"):
            assert r[k] == pytest.approx(w[k], rel=1e-10, abs=1e-14)


def test_scan_with_failing_rows_writes_markers_and_exits_2(capsys):
    code, out = run(["scan", "--model", "xy-aniso", "--grid-gamma", "0:0:1", "--grid-T", "0:1:1"], capsys)
    assert code == 2
    header, rows = read_csv(out.out)
    err = header.index("error")
    assert rows[0][err].startswith("DomainError") and rows[1][err] == ""


def test_scan_non_finite_cells(capsys):
    code, out = run(["scan", "--model", "xy-aniso", "--grid-gamma", "1:1:1", "--T", "0.05"], capsys)
    assert code == 0
    header, rows = read_csv(out.out)
    row = dict(zip(header, rows[0]))
    assert row["degenerate"] == "true" and row["var_sim_1"] == "inf" and row["cross_bound"] == "nan"


# -- check ----------------------------------------------------------------------


def test_check_oracle_passes(capsys):
    code, out = run(["check", "--checks", "oracle", "--samples", "50"], capsys)
    assert code == 0
    assert out.out.startswith("PASS oracle")


def test_check_basis_iso(capsys):
    code, out = run(["check", "--checks", "basis", "--model", "xy-iso-field", "--grid-B", "-1:1:1", "--grid-T", "0.2:1:0.4"], capsys)
    assert code == 0 and "PASS basis[xy-iso-field]" in out.out


def test_check_closed_forms_names_failing_check(capsys):
    # the transcribed cross term has the opposite sign, so this check fails
    code, out = run(["check", "--checks", "closed-forms", "--model", "xy-iso-field", "--grid-B", "-1:1:1",
                     "--grid-T", "0.5:1:0.5"], capsys)
    assert code == 1
    assert "FAIL closed-forms[xy-iso-field]" in out.out and "delta_F12" in out.out
