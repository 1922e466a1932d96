import csv
import io
import json
import math
import subprocess
import sys

import numpy as np
import pytest
from scipy.integrate import quad

from kepler_wkb.atomic import QuantumNumbers
from kepler_wkb.cli import ConfigError, format_value, main, parse_range
from kepler_wkb.wavefunctions import exact_radial


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows_of(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_parse_range():
    assert parse_range("1..3,7") == [1, 2, 3, 7]
    assert parse_range("4") == [4]
    with pytest.raises(ConfigError):
        parse_range("a..b")


def test_format_value():
    assert format_value(float("nan")) == "nan"
    assert format_value(1 / 3) == "0.333333333333"
    assert format_value(-0.0) == "0"
    assert format_value(7) == "7"


def test_energies_se(capsys):
    code, out, _ = run(capsys, "energies", "--variant", "se", "--n", "1..5", "--order", "1", "--tol", "1e-10")
    rows = rows_of(out)
    assert code == 0 and len(rows) == 15
    assert max(float(r["abs_error"]) for r in rows) <= 1e-10


def test_energies_pm_ground_state(capsys):
    code, out, _ = run(capsys, "energies", "--variant", "pm", "--n", "1", "--l", "0")
    assert code == 0 and float(rows_of(out)[0]["energy"]) == pytest.approx(-2.0, abs=1e-9)


def test_energies_langer(capsys):
    code, out, _ = run(capsys, "energies", "--variant", "lm", "--n", "3", "--order", "1")
    rows = rows_of(out)
    assert [int(r["l"]) for r in rows] == [0, 1, 2]
    assert all(float(r["energy"]) == pytest.approx(-1 / 18, abs=1e-10) for r in rows)


def test_failed_check_exits_one_with_json_summary(capsys):
    code, out, _ = run(capsys, "energies", "--variant", "pm", "--state", "1,0", "--tol", "1e-6", "--format", "json")
    doc = json.loads(out)
    assert code == 1 and doc["ok"] is False and len(doc["failures"]) == 1


def test_orders_se(capsys):
    code, out, _ = run(capsys, "orders", "--variant", "se", "--state", "3,1", "--kmax", "6", "--tol", "1e-8")
    rows = rows_of(out)
    assert code == 0 and [int(r["k"]) for r in rows] == [2, 3, 4, 5, 6]


def test_orders_langer(capsys):
    code, out, _ = run(capsys, "orders", "--variant", "lm", "--state", "2,1", "--kmax", "2")
    assert code == 0 and float(rows_of(out)[0]["magnitude"]) > 1e-4


def test_orders_radial_reports(capsys):
    code, out, _ = run(capsys, "orders", "--variant", "se", "--state", "1,0", "--kmax", "4")
    assert code == 0 and len(rows_of(out)) == 3


def test_wavefunction_csv(capsys, tmp_path):
    path = tmp_path / "wf.csv"
    code, out, err = run(capsys, "wavefunction", "--state", "1,0", "--out", str(path))
    assert code == 0 and out == ""
    rows = rows_of(path.read_text())
    assert list(rows[0]) == ["r", "exact", "wkb_se", "wkb_lm", "wkb_pm"]
    assert len(rows) == 2001
    r = np.array([float(x["r"]) for x in rows])
    assert r[0] > 0 and r[-1] == pytest.approx(1.3 * 2.0)
    assert any(x["wkb_se"] == "nan" for x in rows)
    u = np.array([float(x["exact"]) for x in rows])
    grid_norm = np.trapezoid(np.concatenate(([0.0], u**2)), np.concatenate(([0.0], r)))
    truth, _ = quad(lambda x: exact_radial(QuantumNumbers(1, 0), x) ** 2, 0, r[-1])
    assert grid_norm == pytest.approx(truth, abs=1e-6)
    assert "exact_norm_on_grid" in err


def test_wavefunction_wide_grid_is_normalized(capsys):
    code, out, _ = run(capsys, "wavefunction", "--state", "3,0", "--extent", "5", "--format", "json")
    doc = json.loads(out)
    assert code == 0 and doc["meta"]["exact_norm_on_grid"] == pytest.approx(1.0, abs=1e-6)
    assert doc["rows"][0]["wkb_se"] is not None


def test_dipole_table_series(capsys):
    code, out, err = run(capsys, "dipole-table", "--series", "2p-nd", "--semi-tol", "0.05")
    rows = rows_of(out)
    assert code == 0 and len(rows) == 8
    assert float(rows[0]["semiclassical"]) == pytest.approx(4.542, abs=0.05)
    assert "convention = anchor=initial" in err


def test_dipole_table_full_exact_column(capsys):
    code, out, _ = run(capsys, "dipole-table", "--format", "json")
    doc = json.loads(out)
    assert code == 0 and len(doc["rows"]) == 23
    assert all(abs(r["exact_deviation"]) <= 0.005 for r in doc["rows"])
    assert doc["meta"]["calibrated"] is True and "full_table_mean_abs_deviation" in doc["meta"]


def test_dipole_table_pinned_convention_is_diagnostic(capsys):
    code, out, err = run(capsys, "dipole-table", "--convention", "initial,coefficient=printed")
    assert code == 0 and "calibrated = False" in err


def test_dipole_table_missing_file(capsys, tmp_path, monkeypatch):
    monkeypatch.setenv("KEPLER_WKB_REF_TABLE", str(tmp_path / "missing.txt"))
    code, _, err = run(capsys, "dipole-table")
    assert code == 2 and "not found" in err


def test_usage_errors(capsys):
    assert run(capsys, "energies", "--n", "x")[0] == 2
    assert run(capsys, "orders", "--state", "2,1", "--kmax", "9")[0] == 2
    assert run(capsys, "dipole-table", "--series", "3d-nf")[0] == 2
    with pytest.raises(SystemExit) as exc:
        main(["energies", "--bogus"])
    assert exc.value.code == 2


def test_output_is_deterministic(capsys):
    first = run(capsys, "energies", "--n", "1..3", "--format", "json")[1]
    second = run(capsys, "energies", "--n", "1..3", "--format", "json")[1]
    assert first == second


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "kepler_wkb", "energies", "--state", "2,1"], capture_output=True, text=True
    )
    assert proc.returncode == 0 and proc.stdout.startswith("variant,n,l")
