import json
import subprocess
import sys

import numpy as np
import pytest

from logigrowth import __version__
from logigrowth.cli import EXIT_CHECK_FAILED, EXIT_DATA, EXIT_DOMAIN, EXIT_USAGE, ingest, main
from logigrowth.errors import DataError
from synthetic import f5_series


def _write(path, text):
    path.write_text(text, encoding="utf-8")
    return str(path)


def _series_csv(tmp_path, series, name="data.csv"):
    lines = ["year,K,L,Y"] + [f"{y},{k!r},{l!r},{v!r}" for y, k, l, v in
                              zip(series.years, series.K, series.L, series.Y)]
    return _write(tmp_path / name, "\n".join(lines) + "\n")


def _run(argv, capsys):
    code = main(argv)
    cap = capsys.readouterr()
    return code, cap.out, cap.err


# --- ingest ---------------------------------------------------------------

def test_ingest_sorts_years(tmp_path):
    p = _write(tmp_path / "a.csv", "year,K,L,Y\n1951,2,2,2\n1950,1,1,1\n1952,3,3,3\n")
    s = ingest(p)
    assert s.years == (1950, 1951, 1952)
    assert s.K == (1.0, 2.0, 3.0)


def test_ingest_reports_line_of_nonpositive_value(tmp_path):
    p = _write(tmp_path / "a.csv", "year,K,L,Y\n1950,1,1,1\n1951,2,2,2\n1952,3,3,0\n")
    with pytest.raises(DataError) as exc:
        ingest(p)
    assert exc.value.line == 4 and "1952" in str(exc.value)


@pytest.mark.parametrize("text", [
    "year,K,L\n1950,1,1\n",
    "year,K,L,Y\n1950,1,1,1\n1950,2,2,2\n",
    "year,K,L,Y\n1950,1,x,1\n",
    "year,K,L,Y\n1950,1,1\n",
    "year,K,L,Y\n",
    "",
])
def test_ingest_rejects(tmp_path, text):
    with pytest.raises(DataError):
        ingest(_write(tmp_path / "a.csv", text))


def test_ingest_missing_file(tmp_path):
    with pytest.raises(DataError):
        ingest(str(tmp_path / "none.csv"))


# --- commands -------------------------------------------------------------

def test_eval_at_capital_capacity(capsys):
    code, out, _ = _run(["eval", "--param", "K_values=[113]", "--param", "L_values=[5, 50, 100]"],
                        capsys)
    assert code == 0
    doc = json.loads(out)
    assert [r[2] for r in doc["rows"]] == [120.0, 120.0, 120.0]
    assert doc["version"] == __version__ and doc["config"]["NK"] == 113.0


def test_sigma1_command(capsys):
    code, out, _ = _run(["sigma1", "--param", "expect_min=-0.0151724",
                         "--param", "expect_max=0.4982042"], capsys)
    assert code == 0
    res = json.loads(out)["result"]
    assert res["expect_min_passed"] and res["expect_max_passed"]


def test_fit_command_recovers_synthetic(tmp_path, capsys):
    p = _series_csv(tmp_path, f5_series())
    code, out, _ = _run(["fit", "--input", p], capsys)
    assert code == 0
    params = json.loads(out)["result"]["params"]
    assert params["alpha"] == pytest.approx(0.41, abs=1e-6)
    assert params["C"] == pytest.approx(0.31, abs=1e-6)


def test_outputs_are_byte_identical(tmp_path, capsys):
    p = _series_csv(tmp_path, f5_series(noise=0.5))
    for fmt in ("json", "csv"):
        a = _run(["fit", "--input", p, "--format", fmt], capsys)[1]
        b = _run(["fit", "--input", p, "--format", fmt], capsys)[1]
        assert a == b
    assert a.startswith("# ") and '"version"' in a.splitlines()[0]


def test_config_file_and_override(tmp_path, capsys):
    cfg = _write(tmp_path / "c.json", json.dumps({"C": 2.0, "K_values": [50], "L_values": [50]}))
    _, out, _ = _run(["eval", "--config", cfg], capsys)
    from_file = json.loads(out)
    _, out, _ = _run(["eval", "--config", cfg, "--param", "C=1.0"], capsys)
    overridden = json.loads(out)
    assert from_file["config"]["C"] == 2.0 and overridden["config"]["C"] == 1.0
    assert from_file["rows"][0][2] != overridden["rows"][0][2]


def test_output_file(tmp_path, capsys):
    target = tmp_path / "out.csv"
    code, out, _ = _run(["flow", "--format", "csv", "--output", str(target)], capsys)
    assert code == 0 and out == ""
    lines = target.read_text().splitlines()
    assert lines[2] == "t,K,L" and len(lines) == 3 + 71


@pytest.mark.parametrize("argv,code", [
    (["eval", "--param", "nonsense=1"], EXIT_USAGE),
    (["eval", "--family", "f99"], EXIT_USAGE),
    (["eval", "--param", "C=-5"], EXIT_DOMAIN),
    (["profit"], EXIT_CHECK_FAILED),
    (["frobnicate"], EXIT_USAGE),
])
def test_exit_codes(argv, code, capsys):
    got, _, err = _run(argv, capsys)
    assert got == code
    if code in (EXIT_DOMAIN, EXIT_USAGE) and argv[0] != "frobnicate":
        assert json.loads(err)["exit_code"] == code


def test_bad_data_exit_code(tmp_path, capsys):
    p = _write(tmp_path / "a.csv", "year,K,L,Y\n1950,1,1,1\n1951,-2,2,2\n")
    code, _, err = _run(["fit", "--input", p], capsys)
    assert code == EXIT_DATA and json.loads(err)["line"] == 3


@pytest.mark.parametrize("cmd", ["check", "shock", "wage-share", "flow"])
def test_other_commands_succeed(cmd, capsys):
    code, out, _ = _run([cmd], capsys)
    assert code == 0
    assert json.loads(out)["command"] == cmd


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "logigrowth.cli", "--version"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and __version__ in proc.stdout
