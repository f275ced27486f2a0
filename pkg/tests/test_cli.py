"""CLI surface tests: file handling, exit codes, formats, determinism."""

import csv
import io
import json

import numpy as np
import pytest

from nullcartan.cli import main

from conftest import golden_mate


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def body_of(out):
    lines = [l for l in out.splitlines() if not l.startswith("#")]
    return json.loads("\n".join(lines))


@pytest.fixture()
def quintic_file(tmp_path, capsys):
    path = tmp_path / "quintic.json"
    code = main(["fixture", "--output", str(path)])
    assert code == 0
    capsys.readouterr()
    return str(path)


@pytest.fixture()
def profile6_file(tmp_path):
    path = tmp_path / "profile6.json"
    path.write_text(json.dumps({
        "dimension": 6, "parameter": "t",
        "curvatures": ["0.2", "-0.1", "1 + t"],
        "interval": [0.0, 1.0], "step": 0.001}))
    return str(path)


# ---------------------------------------------------------------------------

def test_classify_fixture(quintic_file, capsys):
    code, out, _ = run(capsys, "classify", quintic_file)
    assert code == 0
    body = body_of(out)
    assert body["verdicts"]["family"] is True
    assert body["summary"]["nullity_sequence"] == [0, 1, 2, 2, 1, 0]
    assert body["summary"]["degeneration_degree"] == 2


def test_classify_input_error(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"dimension": 5, "parameter": "s",
                               "components": ["s", "s^2", "s^3"],
                               "domain": [0, 1]}))
    code, _, err = run(capsys, "classify", str(bad))
    assert code == 2
    diag = json.loads(err.splitlines()[-1])
    assert diag["category"] == "input"


def test_classify_parse_error(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"dimension": 5, "parameter": "s",
                               "components": ["s", "s", "s**3", "s", "s"],
                               "domain": [0, 1]}))
    code, _, err = run(capsys, "classify", str(bad))
    assert code == 2


def test_classify_family_violation_exit_code(tmp_path, capsys):
    f = tmp_path / "poly.json"
    f.write_text(json.dumps({"dimension": 5, "parameter": "s",
                             "components": ["sin(s)", "cos(s)", "s", "s^2/2",
                                            "s^3/6"],
                             "domain": [0, 1]}))
    # classify reports family false with exit 0 (a verdict was computed)
    code, out, _ = run(capsys, "classify", str(f))
    assert code == 0
    assert body_of(out)["verdicts"]["family"] is False


def test_frame_row_count_matches_samples(quintic_file, capsys):
    code, out, _ = run(capsys, "frame", quintic_file, "--grid", "9")
    assert code == 0
    body = body_of(out)
    assert len(body["table"]["rows"]) == 9
    assert body["summary"]["max_frenet_residual"] <= 1e-2  # coarse stencil grid
    k_cols = [c for c in body["table"]["columns"] if c.startswith("k")]
    assert k_cols == ["k1", "k2"]


def test_bertrand_fixture(quintic_file, capsys):
    code, out, _ = run(capsys, "bertrand", quintic_file, "--mu", "1")
    assert code == 0
    body = body_of(out)
    assert body["verdicts"]["bertrand"] is True
    assert body["summary"]["alignment_defect"] <= 1e-9
    cols = body["table"]["columns"]
    for row in body["table"]["rows"]:
        s = row[cols.index("s")]
        assert row[cols.index("sbar")] == pytest.approx(s)
        got = np.array(row[2:])
        assert np.max(np.abs(got - golden_mate(s, 1.0))) <= 1e-9


def test_bertrand_negative_verdict_exits_zero(tmp_path, capsys):
    f = tmp_path / "bent.json"
    f.write_text(json.dumps({
        "dimension": 5, "parameter": "t", "curvatures": ["0.3", "0"],
        "interval": [0.0, 1.0], "step": 0.001}))
    code, out, _ = run(capsys, "bertrand", str(f), "--mu", "1")
    assert code == 0
    body = body_of(out)
    assert body["verdicts"]["bertrand"] is False
    assert body["summary"]["max_k1"] == pytest.approx(0.3, abs=1e-6)


def test_sphere_on_synthesized_recipe(tmp_path, capsys):
    f = tmp_path / "sphere.json"
    f.write_text(json.dumps({
        "dimension": 6, "parameter": "t", "curvatures": ["0.1", "0.05", "0.5"],
        "interval": [0.0, 1.0], "step": 0.001}))
    code, out, _ = run(capsys, "sphere", str(f))
    assert code == 0
    body = body_of(out)
    assert body["verdicts"]["is_spherical"] is True
    assert body["summary"]["radius"] == pytest.approx(2.0, rel=1e-6)


def test_sphere_dimension_hypothesis_exit_code(quintic_file, capsys):
    code, _, err = run(capsys, "sphere", quintic_file)
    assert code == 3
    assert json.loads(err.splitlines()[-1])["category"] == "hypothesis"


def test_numerical_failure_exit_code(tmp_path, capsys):
    f = tmp_path / "degenerate.json"
    f.write_text(json.dumps({
        "dimension": 6, "parameter": "t", "curvatures": ["0.1", "0", "t - 0.5"],
        "interval": [0.0, 1.0], "step": 0.001}))
    code, _, err = run(capsys, "frame", str(f), "--grid", "9")
    assert code == 4
    assert json.loads(err.splitlines()[-1])["category"] == "numerical"


def test_evolute_roundtrip_command(tmp_path, capsys):
    f = tmp_path / "ev.json"
    f.write_text(json.dumps({
        "dimension": 6, "parameter": "t",
        "curvatures": ["0.15", "-0.05", "1/(1 + t)"],
        "interval": [-0.6, 1.1], "step": 0.001}))
    code, out, _ = run(capsys, "evolute", str(f), "--grid", "11", "--roundtrip")
    assert code == 0
    body = body_of(out)
    assert body["summary"]["speed_defect"] <= 1e-5
    assert body["summary"]["roundtrip_sup_distance"] <= 1e-5


def test_involute_circle(tmp_path, capsys):
    f = tmp_path / "circle.json"
    f.write_text(json.dumps({
        "dimension": 5, "parameter": "s",
        "components": ["0", "0", "1.5*cos(s)", "1.5*sin(s)", "0"],
        "domain": [0.0, 2.0]}))
    code, out, _ = run(capsys, "involute", str(f), "--t0", "0", "--grid", "5")
    assert code == 0
    body = body_of(out)
    cols = body["table"]["columns"]
    row = body["table"]["rows"][-1]
    t = row[cols.index("t")]
    assert row[cols.index("s")] == pytest.approx(1.5 * t, abs=1e-9)


def test_synthesize_frame_round_trip(profile6_file, tmp_path, capsys):
    out_path = tmp_path / "synth.json"
    code, _, _ = run(capsys, "synthesize", profile6_file, "--grid", "17",
                     "--output", str(out_path))
    assert code == 0
    raw = out_path.read_text()
    assert raw.splitlines()[0].startswith("#")
    spec = json.loads("\n".join(l for l in raw.splitlines()
                                if not l.startswith("#")))
    assert spec["kind"] == "synthesized"
    assert spec["max_gram_defect"] <= 1e-10
    # re-ingest: frame must reproduce the prescribed curvatures
    code, out, _ = run(capsys, "frame", str(out_path), "--grid", "9")
    assert code == 0
    body = body_of(out)
    cols = body["table"]["columns"]
    for row in body["table"]["rows"]:
        t = row[cols.index("t")]
        got = [row[cols.index("k1")], row[cols.index("k2")], row[cols.index("k3")]]
        assert np.max(np.abs(np.array(got) - [0.2, -0.1, 1 + t])) <= 1e-6


def test_report_bodies_are_deterministic(quintic_file, capsys):
    _, out1, _ = run(capsys, "classify", quintic_file)
    _, out2, _ = run(capsys, "classify", quintic_file)
    strip = lambda s: "\n".join(l for l in s.splitlines() if not l.startswith("#"))
    assert strip(out1) == strip(out2)


def test_csv_format_is_rfc4180_parseable(quintic_file, capsys):
    code, out, _ = run(capsys, "classify", quintic_file, "--format", "csv")
    assert code == 0
    table_lines = [l for l in out.splitlines() if not l.startswith("#")]
    rows = list(csv.reader(io.StringIO("\n".join(table_lines))))
    assert rows[0] == ["i", "r_i", "q_i"]
    assert len(rows) == 7  # header + 6 sequence entries
    assert [r[1] for r in rows[1:]] == ["0", "1", "2", "2", "1", "0"]


def test_float_serialization_round_trips(quintic_file, capsys):
    _, out, _ = run(capsys, "classify", quintic_file)
    body = body_of(out)
    tol = body["tolerances"]["classification"]
    assert tol == 1e-9  # 17 significant digits survive the JSON round trip


def test_fixture_output_is_pure_json(capsys):
    code, out, _ = run(capsys, "fixture")
    assert code == 0
    data = json.loads(out)
    assert data["dimension"] == 5
    assert len(data["components"]) == 5


def test_reparam_command(quintic_file, capsys):
    code, out, _ = run(capsys, "reparam", quintic_file, "--grid", "17")
    assert code == 0
    body = body_of(out)
    assert body["summary"]["unit_speed_defect"] <= 1e-6
    rows = body["table"]["rows"]
    assert len(rows) == 17
    # the bundled curve is already pseudo-arc: sbar(t) = t
    for t, sbar in rows:
        assert sbar == pytest.approx(t, abs=1e-9)
