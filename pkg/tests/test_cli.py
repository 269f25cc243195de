import csv
import json
import logging
from fractions import Fraction

import pytest

from polybilliards.dynamics import generate_orbit, leader
from polybilliards.errors import EXIT_IO, EXIT_MALFORMED, EXIT_USAGE, MalformedInput
from polybilliards.main import run_command
from polybilliards.orbit_csv import read_orbit_csv
from polybilliards.svg import render_svg

from .conftest import RECTANGLE, SQUARE


def run(capsys, *argv):
    code = run_command([str(a) for a in argv])
    out = capsys.readouterr().out
    return code, json.loads(out)


@pytest.fixture
def square_file(polygon_file):
    return polygon_file(SQUARE, "square")


def _rows(path):
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


def test_simulate_writes_orbit_csv(capsys, square_file, tmp_path):
    out = tmp_path / "orbit.csv"
    code, payload = run(capsys, "simulate", "--polygon", square_file, "--side", 0, "--offset", "1/3",
                        "--direction", "1,2", "--steps", 100, "--out", out)
    assert code == 0
    assert payload["steps"] == 100
    assert payload["termination"] == "Completed(100)"
    with open(out, encoding="utf-8") as fh:
        assert fh.readline().strip() == "index,side,offset,arclength,theta,x,y,termination"
    rows = _rows(out)
    assert len(rows) == 100
    assert (rows[0]["index"], rows[0]["side"], rows[0]["arclength"]) == ("1", "2", "13/6")
    assert (rows[0]["x"], rows[0]["y"]) == ("5/6", "1")
    assert rows[-1]["termination"] == "Completed(100)"
    assert all(not r["termination"] for r in rows[:-1])


def test_simulate_corner_hit_exits_2(capsys, square_file, tmp_path):
    out = tmp_path / "corner.csv"
    code, payload = run(capsys, "simulate", "--polygon", square_file, "--side", 0, "--offset", "1/2",
                        "--direction", "1,2", "--steps", 10, "--out", out)
    assert code == 2
    assert payload["termination"] == "CornerHit(1)"
    rows = _rows(out)
    assert [r["termination"] for r in rows] == ["CornerHit(1)"]
    assert (rows[0]["x"], rows[0]["y"], rows[0]["theta"]) == ("1", "1", "")


def _unit(v):
    m = max(abs(v[0]), abs(v[1]))
    return (v[0] / m, v[1] / m)


def test_orbit_csv_reads_back(capsys, square, square_file, tmp_path):
    out = tmp_path / "orbit.csv"
    run(capsys, "simulate", "--polygon", square_file, "--side", 0, "--offset", "1/3",
        "--direction", "1,2", "--steps", 30, "--out", out)
    record = generate_orbit(square, leader(square, 0, Fraction(1, 3), (1, 2)), 30)
    loaded = read_orbit_csv(out, square)
    assert loaded == record
    assert loaded.footprints == record.footprints
    assert loaded.steps[0].direction != record.steps[0].direction


def test_orbit_csv_keeps_the_corner_of_an_early_stop(capsys, square, square_file, tmp_path):
    out = tmp_path / "corner.csv"
    code, _ = run(capsys, "simulate", "--polygon", square_file, "--side", 0, "--offset", "1/3",
                  "--direction", "1,3", "--steps", 10, "--out", out)
    assert code == 2
    rows = _rows(out)
    assert [r["index"] for r in rows] == ["1", "2"]
    assert rows[-1]["termination"] == "CornerHit(2)"
    loaded = read_orbit_csv(out, square)
    assert loaded.termination.kind == "CornerHit"
    assert loaded.stopped_at.point == (1, 0)
    assert loaded.start.foot.point == (Fraction(1, 3), 0)
    assert _unit(loaded.start.direction) == (Fraction(1, 3), 1)
    assert len(loaded.steps) == 1


def test_orbit_csv_without_a_footpoint_cannot_be_rebuilt(capsys, square, square_file, tmp_path):
    out = tmp_path / "corner.csv"
    run(capsys, "simulate", "--polygon", square_file, "--side", 0, "--offset", "1/2",
        "--direction", "1,2", "--steps", 10, "--out", out)
    with pytest.raises(MalformedInput):
        read_orbit_csv(out, square)


def test_compare_identical_orbits(capsys, square_file, tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for path in (a, b):
        run(capsys, "simulate", "--polygon", square_file, "--side", 0, "--offset", "1/3",
            "--direction", "1,2", "--steps", 100, "--out", path)
    code, payload = run(capsys, "compare", "--a", a, "--b", b)
    assert code == 0
    assert payload == {"equivalent": True, "witness": None, "horizon": 100}
    code, payload = run(capsys, "compare", "--a", a, "--b", b, "--horizon", 50, "--polygon-a", square_file)
    assert payload["horizon"] == 50


def test_float_compare_without_polygons_warns(capsys, caplog, square_file, tmp_path):
    a = tmp_path / "a.csv"
    run(capsys, "simulate", "--polygon", square_file, "--side", 0, "--offset", "0.25",
        "--direction", "1,1.4142135", "--steps", 20, "--out", a, "--backend", "float")
    with caplog.at_level(logging.WARNING, logger="polybilliards.orbit_csv"):
        code, _ = run(capsys, "compare", "--a", a, "--b", a, "--backend", "float")
    assert code == 0
    assert "no polygon given" in caplog.text
    caplog.clear()
    with caplog.at_level(logging.WARNING, logger="polybilliards.orbit_csv"):
        run(capsys, "compare", "--a", a, "--b", a, "--backend", "float",
            "--polygon-a", square_file, "--polygon-b", square_file)
    assert "no polygon given" not in caplog.text


def test_compare_reports_witness(capsys, square_file, tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    run(capsys, "simulate", "--polygon", square_file, "--side", 0, "--offset", "1/3",
        "--direction", "1,2", "--steps", 40, "--out", a)
    run(capsys, "simulate", "--polygon", square_file, "--side", 0, "--offset", "1/3",
        "--direction", "3,1", "--steps", 40, "--out", b)
    code, payload = run(capsys, "compare", "--a", a, "--b", b, "--horizon", 40)
    assert code == 1
    assert payload["equivalent"] is False
    assert len(payload["witness"]) == 3


def test_equiv_identical_leaders(capsys, polygon_file):
    path = polygon_file(SQUARE, "square")
    leader_args = ["--offset", "0.25", "--direction", "1,1.4142135"]
    code, payload = run(capsys, "equiv", "--p", path, "--q", path, "--p-side", 0, *_prefixed("p", leader_args),
                        "--q-side", 0, *_prefixed("q", leader_args), "--steps", 3000, "--backend", "float")
    assert code == 0
    assert payload["equivalent"] is True
    assert payload["quasisimilarity"]["similar"] is True


def _prefixed(prefix, args):
    return [f"--{prefix}-{a[2:]}" if a.startswith("--") else a for a in args]


def test_analyze_and_surface(capsys, square_file):
    code, payload = run(capsys, "analyze", "--polygon", square_file)
    assert code == 0
    assert payload["angles"]["N"] == 2
    assert payload["exact_lengths"] is True
    code, payload = run(capsys, "surface", "--polygon", square_file)
    assert code == 0
    assert payload["genus"] == 1
    assert (payload["V"], payload["E"], payload["F"]) == (4, 8, 4)


def test_iet_command(capsys, square_file):
    code, payload = run(capsys, "iet", "--polygon", square_file, "--direction", "2,1")
    assert code == 0
    assert payload["reduction"]["total"] == "12"
    assert payload["reduction"]["undefined_domain"] == "0"
    assert sorted(payload["iet"]["permutation"]) == list(range(len(payload["iet"]["lengths"])))
    code, payload = run(capsys, "iet", "--polygon", square_file, "--direction", "1,1")
    assert code == 4
    assert payload["error"] == "ExceptionalDirection"


def test_diagonals_command(capsys, square_file):
    code, payload = run(capsys, "diagonals", "--polygon", square_file, "--direction", "1,1", "--depth", 2)
    assert code == 0
    assert payload["exceptional"] is True
    code, payload = run(capsys, "diagonals", "--polygon", square_file, "--direction", "1,2", "--depth", 1)
    assert code == 1
    assert payload["diagonals"] == []


def test_diagonals_from_an_angle_in_the_exact_backend(capsys, square_file):
    code, payload = run(capsys, "diagonals", "--polygon", square_file, "--angle-deg", "63.43494882230517",
                        "--depth", 3, "--backend", "exact")
    assert code == 0
    assert payload["exceptional"] is True
    assert min(d["bounce_count"] for d in payload["diagonals"]) == 2


def test_classify_command(capsys, square_file):
    code, payload = run(capsys, "classify", "--polygon", square_file, "--side", 0, "--offset", "1/4",
                        "--direction", "1,1", "--steps", 20)
    assert code == 0
    assert payload["result"]["kind"] == "Periodic"


def test_search_finds_perpendicular_leaders(capsys, square_file, polygon_file):
    code, payload = run(capsys, "search", "--p", square_file, "--q", polygon_file(RECTANGLE, "rectangle"),
                        "--side", 0, "--offset", "1/2", "--angle-deg", 90, "--steps", 20, "--grid", 4)
    assert code == 0
    assert payload["candidates"] == 4
    assert payload["agreeing"] == 4
    assert payload["best"][0]["horizon"] == payload["full_horizon"] == 21


def test_report_file_matches_stdout(capsys, square_file, tmp_path):
    report = tmp_path / "reports" / "analyze.json"
    _, payload = run(capsys, "analyze", "--polygon", square_file, "--report", report)
    assert json.loads(report.read_text(encoding="utf-8")) == payload


def test_usage_and_input_errors(capsys, polygon_file, tmp_path):
    code, payload = run(capsys, "bounce")
    assert code == EXIT_USAGE
    assert payload["error"] == "UsageError"
    code, payload = run(capsys, "analyze", "--polygon", tmp_path / "missing.json")
    assert code == EXIT_IO
    bad = tmp_path / "bad.json"
    bad.write_text("{vertices", encoding="utf-8")
    code, payload = run(capsys, "analyze", "--polygon", bad)
    assert code == EXIT_MALFORMED
    assert payload["error"] == "MalformedInput"
    code, payload = run(capsys, "analyze", "--polygon", polygon_file([[0, 0], [1, 0], [2, 0]], "flat"))
    assert code == EXIT_MALFORMED
    assert payload["error"] == "DegeneratePolygon"


def test_leader_offset_must_be_inside_the_side(capsys, square_file, tmp_path):
    code, payload = run(capsys, "simulate", "--polygon", square_file, "--side", 0, "--offset", "1",
                        "--direction", "1,1", "--steps", 5, "--out", tmp_path / "x.csv")
    assert code == EXIT_MALFORMED
    assert "offset" in payload["message"]


def test_svg_output_is_deterministic(capsys, square, square_file, tmp_path):
    svg = tmp_path / "orbit.svg"
    run(capsys, "simulate", "--polygon", square_file, "--side", 0, "--offset", "1/4",
        "--direction", "1,1", "--steps", 4, "--out", tmp_path / "o.csv", "--svg", svg)
    text = svg.read_text(encoding="utf-8")
    assert text.count("<line") == 4
    record = generate_orbit(square, leader(square, 0, Fraction(1, 4), (1, 1)), 4)
    assert render_svg(square, record) == text
    assert 'points="0,0 1,0 1,1 0,1"' in text
