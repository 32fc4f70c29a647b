import json
from pathlib import Path

import numpy as np
import pytest
import yaml

from medium_decoherence.cli import main, run, validate_config

CONFIGS = sorted((Path(__file__).parent.parent / "configs").glob("*.yaml"))


def _write(tmp_path, scenario, params, name="c.yaml"):
    path = tmp_path / name
    path.write_text(yaml.safe_dump({"scenario": scenario, "seed": 0, "parameters": params}))
    return path


GAS = {"m1": 1.0, "m2": 1000.0, "density": 0.1, "potential": {"family": "gaussian", "depth": 0.05, "range": 0.5},
       "grid": {"k_max": 4.0, "points": 201}, "wavenumbers": [2.0]}


@pytest.mark.parametrize("path", CONFIGS, ids=lambda p: p.stem)
def test_shipped_configs_validate(path):
    assert validate_config(path) == []
    assert main(["validate", str(path)]) == 0


def test_heavy_target_with_heavy_particle_warns(tmp_path):
    v = validate_config(_write(tmp_path, "gas", {**GAS, "m1": 2.0, "m2": 1.0}))
    assert [x["level"] for x in v] == ["warning"] and v[0]["field"] == "parameters.m1"


def test_unresolved_eta_is_an_error(tmp_path):
    path = _write(tmp_path, "gas", {**GAS, "eta": 1e-3})
    v = validate_config(path)
    assert any(x["field"] == "parameters.eta" and x["level"] == "error" for x in v)
    assert main(["validate", str(path)]) == 2


@pytest.mark.parametrize("data", [
    {"scenario": "nope", "parameters": {}},
    {"scenario": "young", "parameters": {"slit_separation": 1.0}},
    {"scenario": "toy", "parameters": {"box_weights": "half"}},
    {"scenario": "toy", "parameters": {}, "extra": 1},
])
def test_schema_errors_exit_2(tmp_path, data):
    path = tmp_path / "bad.yaml"
    path.write_text(yaml.safe_dump(data))
    assert any(x["level"] == "error" for x in validate_config(path))
    assert main(["run", str(path), "--output-dir", str(tmp_path), "--quiet"]) == 2


def test_missing_file():
    assert validate_config("/nonexistent.yaml")[0]["level"] == "error"


def test_toy_run(tmp_path):
    status, out = run(_write(tmp_path, "toy", {}), tmp_path / "runs", timestamp="t")
    assert status == 0 and out.name == "toy-t"
    report = json.loads((out / "report.json").read_text())
    assert report["passed"]
    assert (out / "footprint_particle.csv").read_text().startswith("row,col,re [dimensionless],im [dimensionless]")


def test_young_vacuum_reports_null(tmp_path):
    params = {"slit_separation": 1.0, "screen_distance": 100.0, "wavenumber": 10.0}
    status, out = run(_write(tmp_path, "young", params), tmp_path / "runs", timestamp="t")
    assert status == 0
    vis = json.loads((out / "visibility.json").read_text())
    assert vis["measured"]["ratio"] is None and vis["measured"]["background_zero"]
    assert vis["formula"] is None
    header = (out / "pattern.csv").read_text().splitlines()[0]
    assert header == "x [length],intensity [1/length]"


def test_slab_convergence_exponent(tmp_path):
    path = _write(tmp_path, "slab-convergence", {"particle_dim": 4, "n_targets": [1, 2]})
    status, out = run(path, tmp_path / "runs", timestamp="t")
    assert status == 0
    fits = json.loads((out / "report.json").read_text())["fits"]
    for fit in fits.values():
        assert fit["slope"] == pytest.approx(3.0, abs=0.1)
    assert (out / "sweep.csv").read_text().splitlines()[0] == "n_targets,coupling [dimensionless],error [operator norm]"


def test_lindblad_run(tmp_path):
    path = _write(tmp_path, "lindblad", {"t_final": 2.0, "dt": 0.01, "save_every": 10})
    status, out = run(path, tmp_path / "runs", timestamp="t")
    report = json.loads((out / "report.json").read_text())
    assert status == 0 and report["population_error"] < 1e-8 and report["coherent_trace_nonincreasing"]
    assert (out / "trajectory.csv").read_text().startswith("t [1/energy (hbar=1)],trace,purity,min_eigenvalue")


def test_gas_run(tmp_path):
    path = _write(tmp_path, "gas", {**GAS, "grid": {"k_max": 4.0, "points": 401}, "eta": 0.4})
    status, out = run(path, tmp_path / "runs", timestamp="t")
    assert status == 0
    report = json.loads((out / "report.json").read_text())
    assert report["index"]["2.0"]["ratio"]["re"] < 1
    assert len(report["eta_convergence"]) == 2
    lines = (out / "hamiltonian.csv").read_text().splitlines()
    assert lines[0] == "k [1/length],re <k|H|k> [energy],im <k|H|k> [energy]" and len(lines) == 402


def test_runs_are_deterministic(tmp_path):
    path = _write(tmp_path, "slab-convergence", {"particle_dim": 4, "n_targets": [1]})
    _, a = run(path, tmp_path / "a", timestamp="same")
    _, b = run(path, tmp_path / "b", timestamp="same")
    files = sorted(p.name for p in a.iterdir())
    assert files == sorted(p.name for p in b.iterdir())
    for name in files:
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_seed_override_changes_output(tmp_path):
    path = _write(tmp_path, "slab-convergence", {"particle_dim": 4, "n_targets": [1]})
    _, a = run(path, tmp_path / "a", seed=1, timestamp="t")
    _, b = run(path, tmp_path / "b", seed=2, timestamp="t")
    assert (a / "sweep.csv").read_bytes() != (b / "sweep.csv").read_bytes()


def test_numerical_failure_exit_3(tmp_path):
    path = _write(tmp_path, "lindblad", {"t_final": 1.0, "dt": 0.3})
    assert main(["run", str(path), "--output-dir", str(tmp_path / "runs"), "--quiet"]) == 3
    diag = list((tmp_path / "runs").glob("lindblad-*/diagnostics.json"))
    assert len(diag) == 1
    rec = json.loads(diag[0].read_text())
    assert rec["error"] == "ValueError" and rec["parameters"]["dt"] == 0.3


def test_gas_off_grid_wavenumber_exit_3(tmp_path):
    path = _write(tmp_path, "gas", {**GAS, "wavenumbers": [0.123]})
    status, out = run(path, tmp_path / "runs", timestamp="t")
    assert status == 3 and (out / "diagnostics.json").is_file()
    assert np.isfinite(json.loads((out / "diagnostics.json").read_text())["parameters"]["m1"])
