import csv
import io
import json

import pytest

from fekete import cli
from fekete.catalog import get_candidate, load_candidate_file
from fekete.critverify import verify


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_system_counts_text(capsys):
    code, out, _ = run(capsys, "system", "--n", "6")
    assert code == cli.EXIT_OK
    assert "30" in out and "51" in out


def test_format_accepted_after_subcommand(capsys):
    code, out, _ = run(capsys, "system", "--n", "5", "--format", "json")
    data = json.loads(out)
    assert code == 0
    assert data["rows"] == [{"n": 5, "variables": 20, "equations": 35}]


def test_groebner_n4_uses_cache(capsys, tmp_path):
    args = ("--cache-dir", str(tmp_path), "--format", "json", "groebner", "--n", "4")
    code, out, _ = run(capsys, *args)
    first = json.loads(out)
    assert code == 0 and first["degree"] == 4 and not first["cached"]
    code, out, _ = run(capsys, *args)
    assert json.loads(out)["cached"]


def test_groebner_refuses_six_points(capsys):
    code, _, err = run(capsys, "groebner", "--n", "6")
    assert code == cli.EXIT_USAGE
    assert "--allow-long" in err


def test_groebner_budget_exit(capsys, tmp_path):
    code, _, err = run(capsys, "--cache-dir", str(tmp_path), "groebner", "--n", "5", "--time-budget", "0.5", "--no-cache")
    assert code == cli.EXIT_BUDGET
    assert "budget" in err


def test_verify_catalog_csv(capsys):
    code, out, _ = run(capsys, "verify", "--n", "6", "--format", "csv")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and len(rows) == 13
    assert {r["passed"] for r in rows} == {"True"}


def test_verify_json_round_trip(capsys, tmp_path):
    code, out, _ = run(capsys, "verify", "--config", "three3", "--format", "json")
    entry = json.loads(out)["results"][0]["candidate"]
    path = tmp_path / "three3.json"
    path.write_text(json.dumps(entry))
    back = load_candidate_file(path)
    assert back.entries == get_candidate("three3").entries
    assert verify(back).passed
    code, _, _ = run(capsys, "verify", "--file", str(path))
    assert code == 0


def test_verify_failure_exit(capsys, tmp_path):
    n = 4
    bad = {"name": "bad", "n": n, "entries": [["1" if i == j else "-1/4" for j in range(n)] for i in range(n)]}
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(bad))
    code, _, _ = run(capsys, "verify", "--file", str(path))
    assert code == cli.EXIT_VERIFY


def test_unknown_config_is_usage_error(capsys):
    code, _, err = run(capsys, "geometry", "--config", "cube")
    assert code == cli.EXIT_USAGE and "error" in err


def test_verify_needs_a_selection(capsys):
    code, _, err = run(capsys, "verify")
    assert code == cli.EXIT_USAGE and "--n" in err


def test_missing_file_is_usage_error(capsys, tmp_path):
    code, _, _ = run(capsys, "verify", "--file", str(tmp_path / "nope.json"))
    assert code == cli.EXIT_USAGE


def test_orbits_n6(capsys):
    code, out, _ = run(capsys, "orbits", "--n", "6", "--format", "json")
    rows = json.loads(out)["rows"]
    # the two conjugate patterns of the double family each list their 90 points
    assert sum(r["solutions"] for r in rows) == 938


def test_census_mismatch_exit(capsys):
    code, out, _ = run(capsys, "census", "--n", "5", "--expected-degree", "40", "--format", "json")
    assert code == cli.EXIT_CENSUS
    assert json.loads(out)["difference"] == 2


def test_census_default(capsys):
    code, out, _ = run(capsys, "census", "--n", "6")
    assert code == 0 and "938" in out


def test_geometry_falls_back_to_complex_coordinates(capsys):
    code, out, _ = run(capsys, "geometry", "--config", "three3_conj", "--embed", "5", "--format", "json")
    data = json.loads(out)
    assert code == 0 and data["error"].startswith("NotPSD")
    assert data["residual"] < 1e-10


def test_geometry_rank_too_large(capsys):
    code, _, _ = run(capsys, "geometry", "--config", "simplex5", "--embed", "3")
    assert code == cli.EXIT_USAGE


def test_classify_single_dimension(capsys):
    code, out, _ = run(capsys, "classify", "--n", "6", "--d", "4", "--format", "json", "--emit-spectra")
    data = json.loads(out)
    grid = {r["name"]: r["S3"] for r in data["rows"]}
    assert grid["real4"] == "GM" and grid["real1"] == "SM" and grid["simplex5"] == "-"
    assert data["spectra"]


def test_report_writes_figures(capsys, tmp_path):
    out_dir = tmp_path / "rep"
    code, out, _ = run(capsys, "report", "--n", "4", "--out", str(out_dir))
    assert code == 0
    for name in ("report.txt", "report.csv", "classification.csv", "report.json", "energies.png", "hessian_spectra.png"):
        assert (out_dir / name).stat().st_size > 0
    assert (out_dir / "energies.png").read_bytes()[:4] == b"\x89PNG"
    assert "balanced" in (out_dir / "report.txt").read_text()


def test_bad_arguments_exit_two(capsys):
    with pytest.raises(SystemExit) as err:
        cli.main(["census", "--n", "7"])
    assert err.value.code == 2
