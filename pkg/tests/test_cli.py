import csv
import io
import json
import subprocess
import sys

import pytest

from flatband import cli, exact, wkb
from flatband.model import Parity, Regime


def run(argv, capsys):
    code = cli.main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def table(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_scan_columns_and_order(capsys):
    code, out, _ = run(["scan", "--regime", "neg", "--alpha-min", "-2", "--alpha-max", "-0.5",
                        "--alpha-steps", "3", "--n-max", "3"], capsys)
    assert code == 0
    rows = table(out)
    assert list(rows[0]) == list(cli.SCAN_COLUMNS)
    assert len(rows) == 3 * 3 * 2
    keys = [(float(r["alpha"]), int(r["n"]), r["parity"]) for r in rows]
    assert keys == sorted(keys)
    assert all(r["status"] == "ok" and abs(float(r["residual"])) <= 1e-9 for r in rows)


def test_csv_number_format(capsys):
    _, out, _ = run(["spectrum", "--alpha", "-1", "--n-max", "1", "--parity", "odd"], capsys)
    e = table(out)[0]["E_exact_over_m"]
    assert e == "%.12g" % float(e)
    assert len(e.replace("0.", "", 1)) <= 12


def test_output_is_deterministic(tmp_path, capsys):
    args = ["scan", "--regime", "whole", "--alpha-min", "0.2", "--alpha-max", "1.2",
            "--alpha-steps", "4", "--n-max", "3"]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert cli.main(args + ["--out", str(a)]) == 0
    assert cli.main(args + ["--out", str(b), "--workers", "2"]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_empty_grid_writes_header(tmp_path):
    out = tmp_path / "empty.csv"
    assert cli.main(["scan", "--alpha-steps", "0", "--out", str(out)]) == 0
    assert out.read_text() == ",".join(cli.SCAN_COLUMNS) + "\n"


def test_json_format(capsys):
    code, out, _ = run(["critical", "--regime", "interval", "--parity", "odd", "--k-max", "2",
                        "--format", "json"], capsys)
    assert code == 0
    recs = json.loads(out)
    assert recs[0]["alpha_c_exact"] == pytest.approx(1.9158529851, abs=1e-10)
    assert recs[0]["alpha_c_asymptotic"] == pytest.approx(1.9634954085, abs=1e-10)
    assert recs[0]["rel_diff"] == pytest.approx(0.0249, abs=1e-4)
    assert recs[1]["rel_diff"] < recs[0]["rel_diff"]


def test_critical_whole_even(capsys):
    _, out, _ = run(["critical", "--regime", "whole", "--parity", "even", "--k-max", "1"],
                    capsys)
    row = table(out)[0]
    assert float(row["alpha_c_exact"]) == pytest.approx(0.4467884832, abs=1e-10)
    assert float(row["alpha_c_asymptotic"]) == pytest.approx(0.3926990817, abs=1e-10)


def test_wkb_table(capsys):
    code, out, _ = run(["wkb", "--regime", "interval", "--alpha", "0.5", "--n-max", "4"], capsys)
    assert code == 0
    rows = [r for r in table(out) if int(r["n"]) >= 2]
    assert rows and all(float(r["diff_over_m"]) <= 0.05 for r in rows)


def test_wavefunction_default_curves(capsys):
    code, out, _ = run(["wavefunction", "--n-points", "41"], capsys)
    assert code == 0
    rows = table(out)
    assert list(rows[0]) == list(cli.WAVE_COLUMNS)
    assert len(rows) == 4 * 40
    assert {(r["regime"], r["parity"]) for r in rows} == {
        ("neg", "odd"), ("neg", "even"), ("interval", "even"), ("whole", "even")}


def test_wavefunction_rejects_non_eigenpair(capsys):
    code, _, err = run(["wavefunction", "--regime", "neg", "--parity", "odd", "--alpha", "-1",
                        "--energy", "0.5"], capsys)
    assert code == 2
    assert "not a neg odd eigenpair" in err


@pytest.mark.parametrize("argv", [
    ["spectrum"],
    ["spectrum", "--alpha", "1", "--regime", "neg"],
    ["scan", "--alpha-min", "-1"],
    ["scan", "--alpha-min", "-1", "--alpha-max", "-2", "--alpha-steps", "3"],
    ["critical", "--k-max", "0"],
    ["wavefunction", "--regime", "neg"],
])
def test_usage_errors(argv, capsys):
    code, _, err = run(argv, capsys)
    assert code == 1
    assert "error" in err


def test_argparse_errors_exit_with_usage_code():
    for argv in (["bogus"], ["spectrum", "--alpha", "abc"]):
        with pytest.raises(SystemExit) as exc:
            cli.main(argv)
        assert exc.value.code == 1


def test_config_file_with_overrides(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# defaults for this run\nregime = interval\nalpha = 0.5\nn-max = 2\n"
                   "parity = odd\n")
    _, out, _ = run(["spectrum", "--config", str(cfg)], capsys)
    rows = table(out)
    assert {r["regime"] for r in rows} == {"interval"} and len(rows) == 2
    _, out, _ = run(["spectrum", "--config", str(cfg), "--n-max", "3"], capsys)
    assert len(table(out)) == 3


def test_config_file_errors(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("colour = red\n")
    assert run(["spectrum", "--config", str(cfg)], capsys)[0] == 1
    cfg.write_text("regime = sideways\nalpha = -1\n")
    assert run(["spectrum", "--config", str(cfg)], capsys)[0] == 1


def test_verify_report(capsys):
    code, out, _ = run(["verify", "--only", "1,3"], capsys)
    report = json.loads(out)
    assert code == 0 and report["passed"]
    for c in report["checks"]:
        assert {"name", "passed", "measured", "tolerance", "seconds", "detail"} <= set(c)
        assert c["seconds"] >= 0


def test_verify_detects_perturbed_critical_formula(monkeypatch, capsys):
    key = (Regime.POS_INTERVAL, Parity.ODD)
    monkeypatch.setitem(exact._CRIT_OFFSET, key, exact._CRIT_OFFSET[key] + 0.5)
    code, out, _ = run(["verify", "--only", "3"], capsys)
    assert code == 2
    assert not json.loads(out)["passed"]


def test_verify_detects_perturbed_quantization(monkeypatch, capsys):
    for parity in Parity:
        key = (Regime.POS_INTERVAL, 1, parity)
        monkeypatch.setitem(wkb._DELTA, key, wkb._DELTA[key] + 1.0)
    code, out, _ = run(["verify", "--only", "5"], capsys)
    assert code == 2


def test_console_script_exit_codes(tmp_path):
    exe = [sys.executable, "-m", "flatband.cli"]
    ok = subprocess.run(exe + ["critical", "--k-max", "1"], capture_output=True, text=True)
    assert ok.returncode == 0 and ok.stdout.startswith("regime,parity,k")
    bad = subprocess.run(exe + ["scan", "--alpha-min", "-1"], capture_output=True, text=True)
    assert bad.returncode == 1
    fail = subprocess.run(exe + ["wavefunction", "--regime", "whole", "--parity", "even",
                                 "--alpha", "0.5", "--energy", "0.3"],
                          capture_output=True, text=True)
    assert fail.returncode == 2
