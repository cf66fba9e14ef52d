import csv
import json
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qklab import cli, exact


def run(tmp_path, *argv):
    return cli.run([*argv, "--output-dir", str(tmp_path)])


def read_csv(path):
    with open(path) as fh:
        rows = list(csv.reader(fh))
    return rows[0], np.array(rows[1:], dtype=float)


def test_solve_n2_csv(tmp_path):
    assert run(tmp_path, "solve", "--n", "2", "--k", "1") == 0
    header, data = read_csv(tmp_path / "profile_n2_k1.csv")
    assert header == ["r", "u", "v", "ddu", "lambda_rot", "lambda_rad", "S_1", "S_2", "Q_k", "nu_vertical", "residual"]
    r, v = data[:, 0], data[:, 2]
    assert np.all(np.diff(r) > 0)
    m = r <= 0.95
    assert np.max(np.abs(v[m] - 2 * r[m] / (1 - r[m] ** 2))) < 1e-8
    np.testing.assert_allclose(data[:, header.index("Q_k")], data[:, header.index("nu_vertical")], atol=1e-9)


def test_csv_round_trip(tmp_path):
    run(tmp_path, "solve", "--n", "3")
    with open(tmp_path / "profile_n3_k2.csv") as fh:
        next(fh)
        fields = next(fh).split(",") + next(fh).split(",")
    for text in fields:
        assert format(float(text), ".17g") == text.strip()


def test_solve_n3_report(tmp_path):
    assert run(tmp_path, "solve", "--n", "3", "--k", "2") == 0
    report = json.loads((tmp_path / "report_n3_k2.json").read_text())
    assert list(report)[:6] == ["n", "k", "provenance", "blow_up_radius", "checks", "config_echo"]
    assert report["provenance"] == "shooting"
    assert report["blow_up_radius"] == pytest.approx(exact.blowup_radius(3), abs=1e-6)
    assert all(set(c) == {"name", "passed", "max_violation"} for c in report["checks"])
    assert all(c["passed"] for c in report["checks"])
    assert report["config_echo"]["n"] == 3


def test_verify_golden(tmp_path, capsys):
    assert run(tmp_path, "verify", "--n", "4", "--samples", "500", "--seed", "7") == 0
    out = json.loads(capsys.readouterr().out)
    assert out["max_error"] < 1e-9
    header, data = read_csv(tmp_path / "verify_n4_k3.csv")
    assert data.shape[0] == 500


@settings(max_examples=8, deadline=None)
@given(st.integers(2, 5), st.data())
def test_verify_any_k(n, data):
    import tempfile

    k = data.draw(st.integers(0, n - 1))
    with tempfile.TemporaryDirectory() as d:
        assert cli.run(["verify", "--n", str(n), "--k", str(k), "--samples", "40", "--output-dir", d]) == 0


def test_picard_and_barriers(tmp_path):
    assert run(tmp_path, "picard", "--n", "3") == 0
    report = json.loads((tmp_path / "report_picard_n3.json").read_text())
    assert report["provenance"] == "picard" and report["diagnostics"]["iterations"] < 50
    header, _ = read_csv(tmp_path / "trace_n3.csv")
    assert header == ["iteration", "sup_diff", "ratio"]
    assert run(tmp_path, "barriers", "--n", "5", "--grid", "1000", "--plot-script") == 0
    assert (tmp_path / "plot_barriers_n5.gp").exists()


def test_picard_plain_iteration_fails(tmp_path):
    assert run(tmp_path, "picard", "--n", "4", "--relaxation", "1") == 1
    report = json.loads((tmp_path / "report_picard_n4.json").read_text())
    assert "left the window" in report["diagnostics"]["failure"]


def test_tangency_command(tmp_path):
    assert run(tmp_path, "tangency", "--n", "3", "--candidate", "paraboloid", "--coef", "3") == 0
    report = json.loads((tmp_path / "report_tangency_n3.json").read_text())
    assert report["diagnostics"]["touch_radius"] > 0


def test_plot_script_references_csv(tmp_path):
    run(tmp_path, "solve", "--n", "2", "--plot-script")
    text = (tmp_path / "plot_n2_k1.gp").read_text()
    assert "'profile_n2_k1.csv'" in text and "/" not in text.split("plot", 1)[1]


def test_json_format(tmp_path):
    assert run(tmp_path, "solve", "--n", "2", "--format", "json") == 0
    cols = json.loads((tmp_path / "profile_n2_k1.json").read_text())["columns"]
    assert cols["r"][0] == 0.0 and len(cols["r"]) == len(cols["residual"])


def test_usage_errors(tmp_path, capsys):
    assert run(tmp_path, "solve", "--n", "1") == 2
    assert run(tmp_path, "solve", "--n", "3", "--k", "3") == 2
    assert run(tmp_path, "picard", "--n", "3", "--k", "1") == 2
    assert run(tmp_path, "frobnicate") == 2
    assert cli.run(["solve"]) == 2
    assert run(tmp_path, "sweep", "--n-values", "2", "--k-values", "5") == 2


def test_io_error(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    assert cli.run(["solve", "--n", "2", "--output-dir", str(blocker / "sub")]) == 3


def test_env_output_dir(tmp_path, monkeypatch):
    monkeypatch.setenv("QKLAB_OUTPUT_DIR", str(tmp_path / "env"))
    assert cli.run(["barriers", "--n", "2", "--grid", "100"]) == 0
    assert (tmp_path / "env" / "barriers_n2.csv").exists()


def snapshot(path):
    return {p.relative_to(path).as_posix(): p.read_bytes() for p in sorted(path.rglob("*")) if p.is_file()}


def test_deterministic_artifacts(tmp_path):
    for sub in ("a", "b"):
        d = tmp_path / sub
        cli.run(["solve", "--n", "4", "--plot-script", "--output-dir", str(d)])
        cli.run(["verify", "--n", "3", "--samples", "50", "--seed", "11", "--output-dir", str(d)])
    assert snapshot(tmp_path / "a") == snapshot(tmp_path / "b")


def test_sweep_parallel_matches_serial(tmp_path):
    args = ["sweep", "--n-values", "2-3", "--r-max", "1.5"]
    assert cli.run([*args, "--output-dir", str(tmp_path / "serial")]) == 0
    assert cli.run([*args, "--jobs", "3", "--output-dir", str(tmp_path / "par")]) == 0
    serial, par = snapshot(tmp_path / "serial"), snapshot(tmp_path / "par")
    # config_echo records --jobs, everything else must match byte for byte
    for name in serial:
        if name.endswith(".json"):
            a, b = json.loads(serial[name]), json.loads(par[name])
            a["config_echo"].pop("jobs"), b["config_echo"].pop("jobs")
            assert a == b
        else:
            assert serial[name] == par[name], name
    header, data = read_csv(tmp_path / "serial" / "sweep_summary.csv")
    assert data[:, :2].tolist() == [[2, 0], [2, 1], [3, 0], [3, 1], [3, 2]]


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "qklab", "barriers", "--n", "3", "--grid", "200",
                           "--output-dir", str(tmp_path)], capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert json.loads(proc.stdout)["passed"] is True
