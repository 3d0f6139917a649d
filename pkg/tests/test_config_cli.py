import csv
import json
import os

import numpy as np
import pytest

from floqkerr.cli import main
from floqkerr.config import RunConfig, parse_config_text
from floqkerr.errors import ConfigInvalid

BASE_CFG = """
[protocol]
delta = -1.0
u = 0.2
kappa = 0.5
period = 2.0

[sweep]
eps0_start = 0.2
eps0_stop = 1.2
eps0_step = 0.5

[run]
cutoff = 8
n_initial_conditions = 3
transient_periods = 300
record_periods = 210
seed = 7
"""


def write_cfg(tmp_path, text=BASE_CFG, name="run.toml"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def test_parse_basic_types():
    entries = parse_config_text(
        'a = 1\nb = 2.5\nc = true\nd = "text"\ne = [30, 40]\n[sec]\nf = -1.0\n'
    )
    values = {k: v for k, (v, _) in entries.items()}
    assert values == {"a": 1, "b": 2.5, "c": True, "d": "text", "e": [30, 40], "sec.f": -1.0}


def test_parse_reports_line_numbers():
    with pytest.raises(ConfigInvalid) as err:
        parse_config_text("a = 1\nnot a key value\n")
    assert "line 2" in str(err.value)
    with pytest.raises(ConfigInvalid) as err:
        parse_config_text("a = 1\na = 2\n")
    assert "duplicate" in str(err.value)


def test_missing_physical_parameter_pinpointed():
    entries = parse_config_text("[protocol]\ndelta = -1.0\nu = 0.2\nkappa = 0.5\n")
    cfg = RunConfig.resolve(entries, None)
    with pytest.raises(ConfigInvalid) as err:
        cfg.protocol_params()
    assert "protocol.period" in str(err.value)


def test_sweep_requires_range():
    cfg = RunConfig.resolve(parse_config_text("[sweep]\neps0_start = 1.0\n"), None)
    with pytest.raises(ConfigInvalid):
        cfg.sweep_values()


def test_sweep_empty_range_rejected():
    text = "[sweep]\neps0_start = 2.0\neps0_stop = 1.0\neps0_step = 0.1\n"
    cfg = RunConfig.resolve(parse_config_text(text), None)
    with pytest.raises(ConfigInvalid):
        cfg.sweep_values()


def test_cli_override_beats_file():
    entries = parse_config_text("[run]\ncutoff = 8\nseed = 1\n")
    cfg = RunConfig.resolve(entries, {"run.cutoff": 12})
    assert cfg.cutoffs() == [12]
    assert cfg.get_int("run.seed") == 1


def test_quantum_sweep_rejects_zero_kappa(tmp_path, capsys):
    cfg = write_cfg(tmp_path, BASE_CFG.replace("kappa = 0.5", "kappa = 0.0"))
    code = main(["quantum-sweep", "--config", cfg, "--out", str(tmp_path)])
    assert code == 2
    assert "kappa" in capsys.readouterr().err


def test_classical_bifurcation_end_to_end(tmp_path):
    cfg = write_cfg(tmp_path)
    out1 = tmp_path / "run1"
    out2 = tmp_path / "run2"
    assert main(["classical-bifurcation", "--config", cfg, "--out", str(out1)]) == 0
    assert main(["classical-bifurcation", "--config", cfg, "--out", str(out2)]) == 0

    csv1 = (out1 / "bifurcation.csv").read_bytes()
    csv2 = (out2 / "bifurcation.csv").read_bytes()
    assert csv1 == csv2  # bit-identical data for the same seed

    meta1 = json.loads((out1 / "bifurcation.csv.meta.json").read_text())
    meta2 = json.loads((out2 / "bifurcation.csv.meta.json").read_text())
    meta1.pop("timestamp"), meta2.pop("timestamp")
    assert meta1 == meta2
    assert meta1["config"]["protocol.delta"] == -1.0

    with open(out1 / "bifurcation.csv", newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert {r["classification"] for r in rows} >= {"FixedPoint", "PeriodTwo"}
    eps_for = lambda label: {float(r["eps0"]) for r in rows if r["classification"] == label}
    assert 0.2 in eps_for("FixedPoint")
    assert 1.2 in eps_for("PeriodTwo")


def test_quantum_sweep_end_to_end_with_resume(tmp_path):
    cfg = write_cfg(
        tmp_path,
        BASE_CFG.replace("eps0_stop = 1.2", "eps0_stop = 0.7"),
    )
    out = tmp_path / "q"
    assert main(["quantum-sweep", "--config", cfg, "--out", str(out)]) == 0
    path = out / "observables.csv"
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 2  # eps0 in {0.2, 0.7}
    assert set(rows[0].keys()) == {
        "eps0", "U", "D", "Na", "variance", "fano", "Sv", "S0v", "ratio",
        "gapP", "gapT", "period_doubled", "flag",
    }
    assert rows[0]["flag"] == ""
    na = float(rows[0]["Na"])
    assert 0.0 <= na < 1.0

    before = path.read_bytes()
    assert main(["quantum-sweep", "--config", cfg, "--out", str(out)]) == 0
    after = path.read_bytes()
    assert before == after  # resume skipped completed rows

    meta = json.loads((out / "observables.csv.meta.json").read_text())
    assert meta["resumed_rows_skipped"] == 2


def test_quantum_sweep_flags_degenerate_rows(tmp_path):
    # near-zero loss: several propagator eigenvalues within 1e-8 of 1;
    # the row is flagged, the sweep still exits 0
    text = BASE_CFG.replace("kappa = 0.5", "kappa = 1e-10").replace(
        "eps0_stop = 1.2", "eps0_stop = 0.2"
    )
    cfg = write_cfg(tmp_path, text)
    out = tmp_path / "flags"
    assert main(["quantum-sweep", "--config", cfg, "--out", str(out)]) == 0
    with open(out / "observables.csv", newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 1
    assert rows[0]["flag"] == "DegenerateSteady"
    assert rows[0]["Na"] == "nan"


def test_wigner_map_end_to_end(tmp_path):
    cfg = write_cfg(tmp_path)
    out = tmp_path / "w"
    code = main(
        ["wigner-map", "--config", cfg, "--out", str(out), "--eps0", "0.2", "--cutoff", "12"]
    )
    assert code == 0
    wigner_csv = out / "wigner_eps0.2_D12.csv"
    report = json.loads((out / "wigner_eps0.2_D12_report.json").read_text())
    meta = json.loads((out / "wigner_eps0.2_D12.csv.meta.json").read_text())
    data = np.loadtxt(wigner_csv, delimiter=",", skiprows=1)
    assert data.shape[1] == 3
    grid_n = meta["grid"]["n_x"]
    assert data.shape[0] == grid_n * meta["grid"]["n_p"]
    assert abs(report["wigner_integral"] - 1.0) < 0.02
    assert report["orbit_classification"] == "FixedPoint"
    # single near-Gaussian lobe at the fixed point: generous disk catches nearly all mass
    assert report["attractor_overlap"] > 0.95 or report["overlap_radius"] < 1.0


def test_verify_quick_runs_and_reports(tmp_path, capsys):
    code = main(["verify", "--quick", "--out", str(tmp_path)])
    captured = capsys.readouterr().out
    assert code == 0
    assert "oracles passed" in captured
    report = json.loads((tmp_path / "verify_report.json").read_text())
    assert report["all_passed"] is True
    assert len(report["results"]) >= 12


def test_convergence_command(tmp_path):
    cfg = write_cfg(tmp_path)
    out = tmp_path / "c"
    code = main(
        [
            "convergence", "--config", cfg, "--out", str(out),
            "--eps0", "0.2", "--cutoffs", "8,10,12", "--observable", "na",
        ]
    )
    assert code == 0
    files = os.listdir(out)
    assert "convergence_na_eps0.2.csv" in files
    meta = json.loads((out / "convergence_na_eps0.2.csv.meta.json").read_text())
    assert meta["converged"] is True
