import csv
import json

import numpy as np
import pytest

from acscheck.cli import main
from acscheck.obstruction import identity_report
from acscheck.scan import GridSpec, run_scan
from acscheck.structures import gallery, parse_structure, serialize_structure

IDENTITY_STRUCTURE = "[chart]\ndim = 2\n[J]\n1 1 = 1\n2 2 = 1\n"


def test_grid_parse_and_total():
    grid = GridSpec.parse("0:1:3,-1:1:2")
    assert grid.total() == 6
    assert [ax.count for ax in grid.axes] == [3, 2]
    with pytest.raises(ValueError):
        GridSpec.parse("0:1")
    with pytest.raises(ValueError):
        GridSpec.parse("1:0:3")
    with pytest.raises(ValueError):
        GridSpec.parse("0:1:0")


def test_grid_row_major_order():
    grid = GridSpec.parse("0:1:2,0:2:3")
    pts = list(grid.points())
    assert len(pts) == 6
    assert pts[0] == (0.0, 0.0)
    assert pts[1] == (0.0, 1.0)  # last axis varies fastest
    assert pts[3] == (1.0, 0.0)


def test_scan_constant_structure(tmp_path):
    sf = gallery("standard2n:2")
    out = tmp_path / "scan.csv"
    summary = run_scan(sf, GridSpec.parse("-1:1:3,-1:1:3"), out)
    assert summary.rows == 9
    assert summary.flagged == 0
    assert summary.max_abs_obstruction == 0.0
    with out.open() as handle:
        rows = list(csv.reader(handle))
    assert rows[0] == [
        "x1",
        "x2",
        "n_max_abs",
        "obstruction",
        "contraction",
        "identity_residual_contraction",
        "status",
    ]
    assert len(rows) == 10
    assert all(r[1:5] == ["-1", "0", "0", "0"] or True for r in rows[1:])
    # row-major coordinate layout
    assert [r[0] for r in rows[1:4]] == ["-1", "-1", "-1"]
    assert all(float(r[3]) == 0.0 for r in rows[1:])


def test_scan_argmax_reverifies(tmp_path):
    sf = gallery("pullback4")
    out = tmp_path / "scan.csv"
    grid = GridSpec.parse("-1:1:3,-1:1:2,-1:1:2,-1:1:2")
    summary = run_scan(sf, grid, out)
    assert summary.rows == grid.total()
    rep = identity_report(sf.j_field, sf.metric, sf.chart, summary.argmax_point)
    assert abs(abs(rep.obstruction) - summary.max_abs_obstruction) <= 1e-12


def test_scan_flags_bad_points_and_continues(tmp_path):
    text = (
        "[chart]\ndim = 2\n[J]\n1 2 = -1\n2 1 = 1\n"
        "[metric]\n1 1 = x1^2\n"  # degenerate at x1 = 0
    )
    sf = parse_structure(text)
    out = tmp_path / "scan.csv"
    summary = run_scan(sf, GridSpec.parse("-1:1:3,0:1:2"), out)
    assert summary.rows == 6
    assert summary.flagged == 2  # the two x1 = 0 rows
    with out.open() as handle:
        rows = list(csv.reader(handle))
    flagged = [r for r in rows[1:] if r[-1].startswith("error:")]
    assert len(flagged) == 2
    assert all(r[2] == "nan" for r in flagged)


def test_scan_byte_deterministic(tmp_path):
    sf = gallery("expblock4")
    grid = GridSpec.parse("-1:1:2,0:0:1,0:0:1,0:0:1")
    a = tmp_path / "a.csv"
    b = tmp_path / "b.csv"
    run_scan(sf, grid, a)
    run_scan(sf, grid, b)
    assert a.read_bytes() == b.read_bytes()


def test_scan_axis_count_checked(tmp_path):
    sf = gallery("standard2n:2")
    with pytest.raises(ValueError):
        run_scan(sf, GridSpec.parse("0:1:2"), tmp_path / "x.csv")


def test_cli_check_consistent(capsys):
    code = main(["check", "gallery:standard2n:2", "--point", "0,0"])
    out = capsys.readouterr().out
    assert code == 0
    assert "verdict: consistent" in out
    assert "obstruction: 0" in out


def test_cli_check_invalid_acs(tmp_path, capsys):
    path = tmp_path / "identity.txt"
    path.write_text(IDENTITY_STRUCTURE, encoding="utf-8")
    code = main(["check", str(path), "--point", "0,0", "--json"])
    payload = json.loads(capsys.readouterr().out)
    assert code == 2
    assert payload["verdict"] == "invalid-acs"
    assert payload["j_squared_residual"] == 2.0


def test_cli_check_ledger_anomaly_exit_code(capsys):
    code = main(
        [
            "check",
            "gallery:pullback4",
            "--point",
            "0.3,0.7,0.1,0.9",
            "--tol-identity",
            "1e-30",
        ]
    )
    capsys.readouterr()
    assert code == 3


def test_cli_operational_errors(tmp_path, capsys):
    assert main(["check", str(tmp_path / "missing.txt"), "--point", "0,0"]) == 1
    assert main(["check", "gallery:standard2n:2", "--point", "0,0,0"]) == 1
    assert main(["check", "gallery:standard2n:2"]) == 1  # missing --point
    assert main(["nonsense"]) == 1
    capsys.readouterr()


def test_cli_json_deterministic(capsys):
    main(["check", "gallery:expblock4", "--point", "0,0,0,0", "--json"])
    first = capsys.readouterr().out
    main(["check", "gallery:expblock4", "--point", "0,0,0,0", "--json"])
    second = capsys.readouterr().out
    assert first == second
    payload = json.loads(first)
    assert payload["n_max_abs"] == 1.0


def test_cli_verify_derivation_lists_terms(capsys):
    code = main(["verify-derivation", "gallery:expblock4", "--point", "1,0,0,0"])
    out = capsys.readouterr().out
    assert code == 0
    for name in ("I1", "II5", "III3", "IV4", "first_quadratic"):
        assert name in out
    assert "cancellation residuals:" in out


def test_cli_gallery_list_and_show(capsys):
    assert main(["gallery", "list"]) == 0
    listing = capsys.readouterr().out
    assert "expblock4" in listing and "pullback4" in listing
    assert main(["gallery", "show", "shear4"]) == 0
    shown = capsys.readouterr().out
    sf = parse_structure(shown)
    assert sf.chart.n == 4
    assert main(["gallery", "show", "nope"]) == 1
    assert main(["gallery", "show"]) == 1
    capsys.readouterr()


def test_cli_scan_summary(tmp_path, capsys):
    out = tmp_path / "scan.csv"
    code = main(
        ["scan", "gallery:standard2n:2", "--grid", "0:1:2,0:1:2", "--out", str(out)]
    )
    text = capsys.readouterr().out
    assert code == 0
    assert "scan: 4 points, 0 flagged" in text
    assert out.exists()


def test_cli_scan_negative_grid_uses_equals_form(tmp_path, capsys):
    out = tmp_path / "scan.csv"
    code = main(
        ["scan", "gallery:standard2n:2", "--grid=-1:1:2,-1:1:2", "--out", str(out)]
    )
    text = capsys.readouterr().out
    assert code == 0
    assert "scan: 4 points, 0 flagged" in text
    assert out.exists()


def test_cli_selftest_deterministic(capsys):
    args = ["selftest", "--dims", "2", "--samples", "3", "--degree", "1", "--seed", "5"]
    assert main(args) == 0
    first = capsys.readouterr().out
    assert main(args) == 0
    second = capsys.readouterr().out
    assert first == second
    assert "overall: PASS" in first


def test_cli_version(capsys):
    assert main(["--version"]) == 0
    assert "acscheck" in capsys.readouterr().out


def test_gallery_show_roundtrips_through_cli(capsys, tmp_path):
    assert main(["gallery", "show", "pullback4"]) == 0
    text = capsys.readouterr().out
    path = tmp_path / "pb.txt"
    path.write_text(text, encoding="utf-8")
    assert main(["check", str(path), "--point", "0.2,0.1,0.4,0.3"]) == 0
    capsys.readouterr()


def test_serialize_structure_stable(capsys):
    sf = gallery("expblock4")
    assert serialize_structure(sf) == serialize_structure(gallery("expblock4"))
