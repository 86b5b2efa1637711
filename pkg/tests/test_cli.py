import csv
import io
import json
import subprocess
import sys
from pathlib import Path

import pytest

from chentype.cli import EXIT, Report, RunConfig, main, run

SPECS = Path(__file__).resolve().parent.parent / "specs"


def spec(name):
    return str(SPECS / f"{name}.json")


def cli(*argv):
    return main([str(a) for a in argv])


def read_json(stem):
    return json.loads(Path(f"{stem}.json").read_text())


def read_csv(stem):
    return list(csv.reader(io.StringIO(Path(f"{stem}.csv").read_text())))


@pytest.mark.parametrize(
    "argv, code",
    [
        (["analyze", spec("sphere"), "--kmax", "3"], EXIT["ok"]),
        (["analyze", spec("cylinder")], EXIT["parabolic"]),
        (["analyze", spec("malformed")], EXIT["parse"]),
        (["analyze", spec("does_not_exist")], EXIT["parse"]),
        (["analyze", spec("sphere"), "--grid", "1x4"], EXIT["config"]),
        (["analyze", spec("sphere"), "--kmax", "0"], EXIT["config"]),
        (["analyze", spec("sphere"), "--kmax", "20"], EXIT["config"]),
        (["ruled-report", spec("ruled_not_unit")], EXIT["normalization"]),
        (["ruled-report", spec("sphere")], EXIT["config"]),
        (["identities", spec("torus_parabolic"), "--no-exclude"], EXIT["parabolic"]),
    ],
)
def test_exit_codes(tmp_path, argv, code):
    assert cli(*argv, "--out", tmp_path / "r") == code
    rep = read_json(tmp_path / "r")
    assert rep["exit_code"] == code
    assert (rep["error"] is None) == (code == 0)


def test_sphere_is_type_one(tmp_path):
    assert cli("analyze", spec("sphere"), "--out", tmp_path / "s") == 0
    v = read_json(tmp_path / "s")["verdict"]
    assert v["finite"] and v["k"] == 1
    assert v["summary"].startswith("finite II-type <= 1")
    rows = read_csv(tmp_path / "s")
    assert rows[0] == ["k", "residual", "cumulative"]
    assert len(rows) == 1 + 5


def test_helicoid_verdict(tmp_path):
    assert cli("analyze", spec("helicoid"), "--kmax", "5", "--out", tmp_path / "h") == 0
    v = read_json(tmp_path / "h")["verdict"]
    # exact two-term relation with imaginary eigenvalues
    assert v["finite"] and v["k"] == 2
    assert v["coefficients"] == pytest.approx([0.0, 4.0], abs=1e-9)
    assert all(isinstance(b, dict) and set(b) == {"re", "im"} for b in v["eigenvalues"])


def test_third_form_helicoid_is_null(tmp_path):
    assert cli("analyze", spec("helicoid"), "--form", "III", "--kmax", "3", "--out", tmp_path / "h") == 0
    v = read_json(tmp_path / "h")["verdict"]
    assert v["finite"] and v["k"] == 1 and v["null_type"]


def test_torus_identities(tmp_path):
    assert cli("identities", spec("torus"), "--out", tmp_path / "t") == 0
    rows = read_csv(tmp_path / "t")
    assert rows[0] == ["name", "residual", "worst_point_s", "worst_point_t", "points"]
    assert len(rows) == 1 + 10
    assert all(float(r[1]) <= 1e-8 for r in rows[1:])


def test_parabolic_samples_excluded(tmp_path):
    assert cli("identities", spec("torus_parabolic"), "--out", tmp_path / "t") == 0
    rep = read_json(tmp_path / "t")
    assert any("excluded" in w for w in rep["warnings"])


def test_ruled_report_helicoid(tmp_path):
    assert cli("ruled-report", spec("helicoid"), "--out", tmp_path / "r") == 0
    sym = read_json(tmp_path / "r")["symbolic"]
    assert [e["exponent"] for e in sym["trace"]] == ["0", "1/2", "2", "7/2"]
    assert sym["crosscheck_residual"] <= 1e-9
    assert sym["forms_crosscheck_residual"] <= 1e-9
    assert sym["vanishing"]["p1_nonzero"]
    rows = read_csv(tmp_path / "r")
    assert rows[0][:3] == ["k", "degree", "exponent"]


def test_ruled_report_quoted_orientation(tmp_path):
    assert cli("ruled-report", spec("helicoid2"), "--kmax", "1", "--orientation", "-1", "--s0", "0",
               "--out", tmp_path / "r") == 0
    sym = read_json(tmp_path / "r")["symbolic"]
    assert sym["p1"]["degree"] <= 3
    assert sym["vanishing"]["witness_value"] == pytest.approx(4.0)


def test_ruled_report_generic_surface_warns(tmp_path):
    assert cli("ruled-report", spec("ruled_cubic"), "--out", tmp_path / "r") == 0
    rep = read_json(tmp_path / "r")
    assert any("bracket form" in w for w in rep["warnings"])
    # planar circle ruling keeps mu = 0, so the degrees stay under the bound
    assert all(e["degree"] <= e["degree_bound"] for e in rep["symbolic"]["trace"])


def test_normalization_report_is_written(tmp_path):
    cli("ruled-report", spec("ruled_not_unit"), "--out", tmp_path / "n")
    norm = read_json(tmp_path / "n")["symbolic"]["normalization"]
    assert not norm["unit_ruling"] and norm["max_violation"] > 1.0


@pytest.mark.parametrize("fmt, files", [("json", {".json"}), ("csv", {".csv"}), ("both", {".json", ".csv"})])
def test_format_selection(tmp_path, fmt, files):
    cli("analyze", spec("sphere"), "--kmax", "2", "--format", fmt, "--out", tmp_path / "x.json")
    assert {p.suffix for p in tmp_path.iterdir()} == files


def test_stdout_output(capsys):
    assert cli("analyze", spec("sphere"), "--kmax", "2", "--format", "json") == 0
    out, err = capsys.readouterr()
    assert json.loads(out)["verdict"]["k"] == 1
    assert "finite II-type" in err


def test_same_config_gives_identical_json(tmp_path):
    for name in ("a", "b"):
        cli("analyze", spec("helicoid"), "--kmax", "3", "--out", tmp_path / "same")
        (tmp_path / "same.json").rename(tmp_path / f"{name}.json")
    assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()


def test_timestamp_is_opt_in(tmp_path):
    cli("analyze", spec("sphere"), "--kmax", "2", "--out", tmp_path / "a")
    cli("analyze", spec("sphere"), "--kmax", "2", "--timestamp", "--out", tmp_path / "b")
    assert read_json(tmp_path / "a")["timestamp"] is None
    assert read_json(tmp_path / "b")["timestamp"]


@pytest.mark.parametrize("name, command", [("helicoid", "analyze"), ("torus", "identities"),
                                           ("helicoid", "ruled-report")])
def test_json_round_trip(name, command):
    report, _ = run(RunConfig(command, spec(name), kmax=3, grid=(4, 4)))
    again = Report.from_json(report.to_json())
    assert again == report
    assert again.to_json() == report.to_json()


def test_config_echo_excludes_timestamp():
    echo = RunConfig("analyze", "x.json").echo()
    assert "timestamp" not in echo and echo["grid"] == [6, 6]


def test_bad_grid_syntax_is_an_argparse_error():
    with pytest.raises(SystemExit) as exc:
        cli("analyze", spec("sphere"), "--grid", "six")
    assert exc.value.code == 2


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "chentype", "analyze", spec("sphere"), "--kmax", "2",
                           "--out", str(tmp_path / "m")], capture_output=True, text=True)
    assert proc.returncode == 0
    assert read_json(tmp_path / "m")["verdict"]["k"] == 1
