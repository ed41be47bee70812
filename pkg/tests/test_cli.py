import csv
import io
import json

import pytest

from heun_spectrum import cli


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_truncate_first_order(capsys):
    code, out, _ = run(capsys, "truncate", "--n", "1", "--l", "0", "--json")
    rec = json.loads(out)
    assert code == 0
    assert rec["results"]["W"] == "4"
    assert rec["results"]["roots"] == ["-1.414213562", "1.414213562"]
    assert set(rec) == {"schema_version", "command", "inputs", "results", "precision_digits"}


def test_truncate_contains_zero_root(capsys):
    code, out, _ = run(capsys, "truncate", "--n", "2", "--csv")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and float(rows[1]["alpha"]) == 0.0 and len(rows) == 3


@pytest.mark.parametrize("argv", [["truncate", "--n", "0", "--l", "0"], ["ritz", "--l", "0"], ["table", "--which", "5"],
                                  ["ritz", "--alpha", "1", "--nmin", "5", "--nmax", "3"], ["hf", "--alpha-exact", "pi"]])
def test_usage_errors_exit_2(capsys, argv):
    try:
        code = cli.main(argv)
    except SystemExit as exc:  # raised by argparse itself
        code = exc.code
    assert code == 2


def test_ritz_exact_token_with_leading_minus(capsys):
    code, out, _ = run(capsys, "ritz", "--l", "1", "--alpha-exact", "-sqrt6", "--nmin", "16", "--nmax", "16",
                       "--count", "3", "--json")
    rec = json.loads(out)
    assert code == 0
    assert rec["inputs"]["alpha"] == "-sqrt6"
    assert rec["results"]["rows"][0]["eigenvalues"] == ["6.000000000", "9.805784090", "13.66928892"]


def test_ritz_csv_blank_cells(capsys):
    code, out, _ = run(capsys, "ritz", "--alpha", "0", "--nmax", "4", "--csv")
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["N", "W0", "W1", "W2", "W3"]
    assert rows[1][3:] == ["", ""]
    assert rows[3][1:] == ["2.000000000", "6.000000000", "10.08832490", "24.98664405"]


def test_ritz_oscillator_limit(capsys):
    code, out, _ = run(capsys, "ritz", "--alpha", "0", "--nmin", "8", "--nmax", "8", "--json")
    assert json.loads(out)["results"]["rows"][0]["eigenvalues"] == [
        "2.000000000", "6.000000000", "10.00000000", "14.00000000"]


def test_precision_exhaustion_exit_3(capsys):
    code, _, err = run(capsys, "ritz", "--alpha", "1", "--nmin", "30", "--nmax", "30", "--digits", "20")
    assert code == 3 and "rerun with at least" in err


def test_full_precision_flag(capsys):
    _, out, _ = run(capsys, "truncate", "--n", "1", "--json", "--full-precision", "--digits", "30")
    root = json.loads(out)["results"]["roots"][1]
    assert root.startswith("1.41421356237309504880168872") and len(root.replace(".", "")) == 30


def test_environment_precedence(capsys, monkeypatch):
    monkeypatch.setenv("HEUN_DIGITS", "35")
    _, out, _ = run(capsys, "truncate", "--n", "1", "--json")
    assert json.loads(out)["precision_digits"] == 35
    _, out, _ = run(capsys, "truncate", "--n", "1", "--json", "--digits", "40")
    assert json.loads(out)["precision_digits"] == 40
    monkeypatch.setenv("HEUN_FORMAT", "csv")
    _, out, _ = run(capsys, "truncate", "--n", "1")
    assert out.startswith("n,l,root_index,alpha,W")


def test_bad_environment_value(capsys, monkeypatch):
    monkeypatch.setenv("HEUN_JOBS", "many")
    code, _, err = run(capsys, "truncate", "--n", "1")
    assert code == 2 and "HEUN_JOBS" in err


def test_replay_round_trip(capsys, tmp_path):
    _, out, _ = run(capsys, "ritz", "--alpha-exact", "sqrt2", "--nmax", "5", "--json")
    path = tmp_path / "rec.json"
    path.write_text(out)
    code, replayed, _ = run(capsys, "--replay", str(path))
    assert code == 0 and replayed == out


def test_replay_detects_tampering(capsys, tmp_path):
    _, out, _ = run(capsys, "truncate", "--n", "1", "--json")
    rec = json.loads(out)
    rec["results"]["W"] = "5"
    path = tmp_path / "rec.json"
    path.write_text(json.dumps(rec))
    code, _, err = run(capsys, "--replay", str(path))
    assert code == 1 and "differ" in err


def test_deterministic_output(capsys):
    first = run(capsys, "sweep", "--alpha-min", "-0.1", "--alpha-max", "0.1", "--levels", "2", "--basis-n", "8",
                "--json")[1]
    second = run(capsys, "sweep", "--alpha-min", "-0.1", "--alpha-max", "0.1", "--levels", "2", "--basis-n", "8",
                 "--json", "--jobs", "2")[1]
    assert first == second


def test_sweep_csv_columns(capsys):
    code, out, _ = run(capsys, "sweep", "--alpha-min", "0", "--alpha-max", "0.1", "--levels", "2", "--basis-n", "8",
                       "--csv")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and list(rows[0]) == ["l", "level", "alpha", "W", "basis_N"] and len(rows) == 6


def test_table_passes(capsys):
    code, out, _ = run(capsys, "table", "--which", "1", "--json")
    rec = json.loads(out)
    assert code == 0 and rec["results"]["passed"] and rec["results"]["diffs"] == []


def test_hf_command(capsys):
    code, out, _ = run(capsys, "hf", "--l", "0", "--alpha", "1", "--level", "0", "--json")
    rec = json.loads(out)
    assert code == 0 and float(rec["results"]["abs_diff"]) < 1e-6


def test_hf_check_failure_exit_1(capsys):
    code, _, err = run(capsys, "hf", "--alpha", "1", "--h", "0.3", "--tol", "1e-9")
    assert code == 1 and "check failed" in err


def test_oracle_compare(capsys):
    code, out, _ = run(capsys, "oracle", "--alpha", "1", "--count", "2", "--npoints", "8000", "--compare", "--json")
    rec = json.loads(out)
    assert code == 0 and float(rec["results"]["max_diff"]) < 1e-5


def test_potential_file(capsys, tmp_path):
    path = tmp_path / "fig1.csv"
    code, _, _ = run(capsys, "potential", "--alphas=-sqrt2,1,sqrt2", "--xi-max", "4", "--step", "0.01", "--csv",
                     "-o", str(path))
    rows = list(csv.DictReader(path.open()))
    assert code == 0 and len(rows) == 3 * 400
    assert list(rows[0]) == ["alpha", "xi", "V"]


def test_potential_minimum_reported(capsys):
    _, out, _ = run(capsys, "potential", "--alphas", "-sqrt2,1", "--xi-max", "0.1", "--step", "0.05", "--json")
    curves = json.loads(out)["results"]["curves"]
    assert curves[0]["minimum"]["xi"] == "0.8908987181" and curves[1]["minimum"] is None


def test_no_command_is_usage_error(capsys):
    assert run(capsys)[0] == 2
