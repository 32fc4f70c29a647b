"""Command-line front end.

    medium-decoherence run CONFIG [--output-dir DIR] [--seed N] [--quiet]
    medium-decoherence validate CONFIG

A config is a YAML mapping with ``scenario`` (toy, slab-convergence,
lindblad, gas, young), an optional ``seed`` and ``output_dir``, and a
``parameters`` table whose keys are listed in :data:`SCHEMA`. Units are
natural (hbar = 1) throughout.

Exit status: 0 on success, 2 for an invalid config, 3 for a numerical
failure (a ``diagnostics.json`` is written next to the partial output).
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from pathlib import Path
from typing import Any

import numpy as np
import yaml

from . import gas as G
from . import young as Y
from .collision import BORN, EXACT
from .generator import (
    amplitude_damping_generator,
    build_generator,
    evolve,
    split_evolve,
    write_trajectory_csv,
)
from .linalg import random_density_matrix
from .oracle import convergence_sweep, local_slab_family, toy_footprint, toy_mixture

log = logging.getLogger("medium_decoherence")

# (type, default); a default of REQUIRED marks a mandatory key
REQUIRED = object()
NUMBER = (int, float)

SCHEMA: dict[str, dict[str, tuple[Any, Any]]] = {
    "toy": {
        "box_weights": (list, [0.5, 0.5]),
    },
    "slab-convergence": {
        "particle_dim": (int, 8),
        "target_dim": (int, 2),
        "n_targets": (list, [1, 2, 3]),
        "couplings": (list, [0.01, 0.02, 0.05, 0.1]),
        "mode": (str, BORN),
        "mixed_targets": (bool, True),
    },
    "lindblad": {
        "fixture": (str, "amplitude-damping"),
        "gamma": (NUMBER, 1.0),
        "t_final": (NUMBER, 10.0),
        "dt": (NUMBER, 1e-3),
        "save_every": (int, 100),
        "particle_dim": (int, 4),
        "target_dim": (int, 2),
        "n_targets": (int, 2),
        "coupling": (NUMBER, 0.1),
    },
    "gas": {
        "m1": (NUMBER, REQUIRED),
        "m2": (NUMBER, REQUIRED),
        "density": (NUMBER, REQUIRED),
        "limit": (str, G.HEAVY_TARGET),
        "order": (int, 0),
        "dimension": (int, 1),
        "potential": (dict, REQUIRED),
        "t_matrix": (str, "born"),
        "grid": (dict, {"k_max": 4.0, "points": 801}),
        "wavenumbers": (list, REQUIRED),
        "eta": (NUMBER, None),
        "v1": (NUMBER, None),
        "targets": (dict, None),
        "packet": (dict, None),
    },
    "young": {
        "slit_separation": (NUMBER, REQUIRED),
        "screen_distance": (NUMBER, REQUIRED),
        "wavenumber": (NUMBER, REQUIRED),
        "im_k_prime_L": (NUMBER, 0.0),
        "re_index": (NUMBER, 1.0),
        "screen_points": (int, 2001),
        "window_periods": (NUMBER, 10.0),
        "sweep": (list, None),
    },
}

TOP_LEVEL = {"scenario", "seed", "output_dir", "parameters"}


class ConfigError(ValueError):
    def __init__(self, violations: list[dict]):
        self.violations = violations
        super().__init__("; ".join(f"{v['field']}: {v['message']}" for v in violations))


def _violation(field: str, message: str, level: str = "error") -> dict:
    return {"field": field, "level": level, "message": message}


def load_config(path) -> dict:
    with open(path) as fh:
        data = yaml.safe_load(fh)
    if not isinstance(data, dict):
        raise ConfigError([_violation("<root>", "config must be a mapping")])
    return data


def _schema_check(data: dict) -> tuple[list[dict], dict]:
    out: list[dict] = []
    for key in sorted(set(data) - TOP_LEVEL):
        out.append(_violation(key, "unknown top-level key"))
    scenario = data.get("scenario")
    if scenario not in SCHEMA:
        out.append(_violation("scenario", f"must be one of {sorted(SCHEMA)}, got {scenario!r}"))
        return out, {}
    if "seed" in data and not isinstance(data["seed"], int):
        out.append(_violation("seed", "must be an integer"))
    raw = data.get("parameters") or {}
    if not isinstance(raw, dict):
        out.append(_violation("parameters", "must be a mapping"))
        return out, {}
    schema = SCHEMA[scenario]
    params = {}
    for key in sorted(set(raw) - set(schema)):
        out.append(_violation(f"parameters.{key}", "unknown key for this scenario"))
    for key, (typ, default) in schema.items():
        if key not in raw:
            if default is REQUIRED:
                out.append(_violation(f"parameters.{key}", "required key missing"))
            params[key] = default
            continue
        val = raw[key]
        if val is not None and not (isinstance(val, typ) and not (typ is not bool and isinstance(val, bool))):
            out.append(_violation(f"parameters.{key}", f"expected {getattr(typ, '__name__', 'number')}, got {type(val).__name__}"))
        params[key] = val
    return out, params


def _potential(spec: dict, dimension: int, base: Path) -> G.Potential:
    spec = dict(spec)
    family = spec.pop("family", None)
    if family == "csv":
        return G.load_potential_csv(base / spec["path"], dimension)
    if family not in G.NAMED_POTENTIALS:
        raise ValueError(f"unknown potential family {family!r}")
    if family == "gaussian" and "range" in spec:
        spec["range_"] = spec.pop("range")
    return G.NAMED_POTENTIALS[family](dimension=dimension, **spec)


def _gas_config(p: dict, base: Path, eta=None) -> G.GasConfig:
    grid = G.MomentumGrid.uniform(float(p["grid"]["k_max"]), int(p["grid"]["points"]))
    pot = _potential(p["potential"], p["dimension"], base)
    tm = None
    if p["t_matrix"] == "contact-exact":
        if pot.name != "contact" or p["dimension"] != 1:
            raise ValueError("contact-exact T-matrix needs a 1-D contact potential")
        tm = G.contact_t_matrix_1d(pot.params["strength"])
    elif p["t_matrix"] != "born":
        raise ValueError(f"unknown t_matrix {p['t_matrix']!r}")
    targets = None
    if p["targets"]:
        t = p["targets"]
        targets = G.TargetMomenta.gaussian(t.get("width", 0.1), t.get("extent", 1.0), t.get("points", 201),
                                           t.get("centers", [0.0]))
    return G.GasConfig(p["m1"], p["m2"], p["density"], grid, pot, p["dimension"], p["v1"], targets, tm,
                       p["eta"] if eta is None else eta)


def _physics_check(scenario: str, p: dict, base: Path) -> list[dict]:
    out = []
    if scenario == "gas":
        ratio = p["m1"] / p["m2"]
        if p["limit"] == G.HEAVY_TARGET and ratio >= 1:
            out.append(_violation("parameters.m1", f"heavy-target limit with m1/m2 = {ratio:g}", "warning"))
        if p["limit"] == G.HEAVY_PARTICLE and ratio <= 1:
            out.append(_violation("parameters.m2", f"heavy-particle limit with m2/m1 = {1 / ratio:g}", "warning"))
        if p["limit"] not in (G.HEAVY_TARGET, G.HEAVY_PARTICLE):
            out.append(_violation("parameters.limit", f"unknown limit {p['limit']!r}"))
        if p["order"] not in (0, 1):
            out.append(_violation("parameters.order", "must be 0 or 1"))
        if p["eta"] is not None:
            grid = p["grid"]
            dk = 2 * grid["k_max"] / (grid["points"] - 1)
            if p["limit"] == G.HEAVY_PARTICLE and p["v1"] is not None:
                spacing = (p["m2"] * abs(p["v1"]) + grid["k_max"]) * dk / p["m2"]
            else:
                spacing = grid["k_max"] * dk / p["m1"]
            if p["eta"] < 2 * spacing:
                out.append(_violation("parameters.eta", f"eta = {p['eta']} does not resolve the grid energy spacing {spacing:.3g} (need eta >= 2x)"))
            elif p["eta"] / 2 < 2 * spacing:
                out.append(_violation("parameters.eta", "eta/2 does not resolve the grid; the eta-halving report will be skipped", "warning"))
        if p["limit"] == G.HEAVY_PARTICLE and not p["targets"]:
            out.append(_violation("parameters.targets", "heavy-particle limit needs target distributions"))
        fam = (p["potential"] or {}).get("family")
        if fam == "csv" and not (base / p["potential"].get("path", "")).is_file():
            out.append(_violation("parameters.potential.path", "tabulated potential file not found"))
    elif scenario == "lindblad":
        if p["fixture"] not in ("amplitude-damping", "slab"):
            out.append(_violation("parameters.fixture", "must be amplitude-damping or slab"))
        if p["dt"] <= 0 or p["t_final"] <= 0:
            out.append(_violation("parameters.dt", "dt and t_final must be positive"))
    elif scenario == "slab-convergence":
        if p["mode"] not in (BORN, EXACT):
            out.append(_violation("parameters.mode", "must be born or exact"))
        c = sorted(p["couplings"])
        if len(c) < 4 or c[-1] / c[0] < 10 - 1e-9:
            out.append(_violation("parameters.couplings", "need at least 4 couplings spanning a decade"))
    elif scenario == "young":
        if p["screen_distance"] < 10 * p["slit_separation"]:
            out.append(_violation("parameters.screen_distance", "needs L >= 10 D"))
        if p["im_k_prime_L"] < 0:
            out.append(_violation("parameters.im_k_prime_L", "Im k' < 0 means gain"))
    return out


def validate_config(path) -> list[dict]:
    """Schema and physics sanity checks without running anything. Returns
    a list of ``{field, level, message}`` violations (empty if clean)."""
    try:
        data = load_config(path)
    except (OSError, yaml.YAMLError) as exc:
        return [_violation("<file>", str(exc))]
    except ConfigError as exc:
        return exc.violations
    out, params = _schema_check(data)
    if any(v["level"] == "error" for v in out):
        return out
    try:
        out += _physics_check(data["scenario"], params, Path(path).parent)
    except (KeyError, TypeError, ZeroDivisionError) as exc:
        out.append(_violation("parameters", f"malformed value: {exc}"))
    return out


# --- output helpers -------------------------------------------------------

def _write_json(path: Path, record: dict) -> None:
    with open(path, "w") as fh:
        json.dump(record, fh, indent=2, sort_keys=True, default=_json_default)
        fh.write("\n")


def _json_default(x):
    if isinstance(x, np.generic):
        return x.item()
    if isinstance(x, np.ndarray):
        return x.tolist()
    if isinstance(x, complex):
        return {"re": x.real, "im": x.imag}
    raise TypeError(type(x))


def _finite(x: float):
    return float(x) if np.isfinite(x) else None


def _write_csv(path: Path, header: list[str], rows) -> None:
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(f"{v:.12e}" if isinstance(v, float) else str(v) for v in row) + "\n")


def _write_matrix_csv(path: Path, m: np.ndarray, unit: str = "dimensionless") -> None:
    rows = [(i, j, float(m[i, j].real), float(m[i, j].imag)) for i in range(m.shape[0]) for j in range(m.shape[1])]
    _write_csv(path, ["row", "col", f"re [{unit}]", f"im [{unit}]"], rows)


# --- scenarios -------------------------------------------------------------

def run_toy(p: dict, out: Path, seed: int) -> dict:
    from .collision import TargetState

    w = p["box_weights"]
    eye = np.eye(2)
    box = [TargetState(0, eye[0], w[0]), TargetState(1, eye[1], w[1])]
    fp_particle, fp_box = toy_footprint()
    mx_particle, mx_box = toy_mixture(box)
    half = np.eye(2) / 2
    box_in = np.diag(w).astype(complex)
    for name, m in [("footprint_particle", fp_particle), ("footprint_box", fp_box),
                    ("mixture_particle", mx_particle), ("mixture_box", mx_box)]:
        _write_matrix_csv(out / f"{name}.csv", m)
    checks = {
        "footprint_particle_is_half_identity": float(np.max(np.abs(fp_particle - half))),
        "mixture_box_unchanged": float(np.max(np.abs(mx_box - box_in))),
    }
    if np.allclose(w, [0.5, 0.5]):
        checks["mixture_particle_is_half_identity"] = float(np.max(np.abs(mx_particle - half)))
    report = {"checks": checks, "passed": all(v < 1e-12 for v in checks.values())}
    _write_json(out / "report.json", report)
    return report


def run_slab_convergence(p: dict, out: Path, seed: int) -> dict:
    rng = np.random.default_rng(seed)
    rho0 = random_density_matrix(p["particle_dim"], rng)
    rows, fits = [], {}
    for n in p["n_targets"]:
        fam = local_slab_family(p["particle_dim"], p["target_dim"], n, seed + n, p["mode"], p["mixed_targets"])
        res = convergence_sweep(fam, rho0, p["couplings"])
        fits[str(n)] = {"slope": _finite(res.slope), "prefactor": res.prefactor, "exact": res.exact}
        rows += [(n, float(l), float(e)) for l, e in zip(res.couplings, res.errors)]
    _write_csv(out / "sweep.csv", ["n_targets", "coupling [dimensionless]", "error [operator norm]"], rows)
    report = {"mode": p["mode"], "fits": fits}
    _write_json(out / "report.json", report)
    return report


def run_lindblad(p: dict, out: Path, seed: int) -> dict:
    if p["fixture"] == "amplitude-damping":
        gamma = float(p["gamma"])
        gen = amplitude_damping_generator(gamma)
        rho0 = np.diag([0.0, 1.0]).astype(complex)
        t_final, dt = p["t_final"] / gamma, p["dt"] / gamma
    else:
        fam = local_slab_family(p["particle_dim"], p["target_dim"], p["n_targets"], seed, EXACT)
        gen = build_generator(fam(p["coupling"]))
        rho0 = random_density_matrix(p["particle_dim"], np.random.default_rng(seed))
        t_final, dt = p["t_final"], p["dt"]
    traj = evolve(rho0, gen, t_final, dt, save_every=p["save_every"])
    coh, mix = split_evolve(rho0, gen, t_final, dt, save_every=p["save_every"])
    write_trajectory_csv(out / "trajectory.csv", traj, [(i, i) for i in range(gen.dim)])
    split_rows = [(float(t), float(np.trace(c).real), float(np.trace(m).real),
                   float(np.linalg.eigvalsh((m + m.conj().T) / 2)[0]),
                   float(np.linalg.norm(c + m - r, 2)))
                  for t, c, m, r in zip(coh.times, coh.states, mix.states, traj.states)]
    _write_csv(out / "split.csv", ["t [1/energy]", "tr rho_coh", "tr rho_mix", "min eig rho_mix", "split residual"],
               split_rows)
    tr = traj.traces()
    report = {
        "fixture": p["fixture"],
        "trace_drift_per_time": float(np.max(np.abs(tr - tr[0])) / max(t_final, 1e-300)),
        "min_eigenvalue": float(np.min(traj.min_eigenvalues())),
        "split_residual": float(max(r[-1] for r in split_rows)),
        "coherent_trace_nonincreasing": bool(np.all(np.diff([r[1] for r in split_rows]) <= 1e-15)),
    }
    if p["fixture"] == "amplitude-damping":
        pop = traj.states[:, 1, 1].real
        report["population_error"] = float(np.max(np.abs(pop - np.exp(-2 * p["gamma"] * traj.times))))
    _write_json(out / "report.json", report)
    return report


def run_gas(p: dict, out: Path, seed: int, base: Path) -> dict:
    cfg = _gas_config(p, base)
    limit, order = p["limit"], p["order"]
    rows, index = [], {}
    for k in p["wavenumbers"]:
        r = G.refraction_index(cfg, float(k), limit, order)
        index[str(k)] = {
            "energy": {"re": r.energy.real, "im": r.energy.imag},
            "ratio": {"re": r.ratio.real, "im": r.ratio.imag},
            "linearized": {"re": r.linearized.real, "im": r.linearized.imag},
            "fermi": {"re": G.fermi_index(cfg, float(k)).real, "im": G.fermi_index(cfg, float(k)).imag},
        }
    H = G.hamiltonian_diagonal(cfg, limit, order) if limit == G.HEAVY_TARGET else np.array(
        [G.hamiltonian_diag_heavy_particle(cfg, float(k), order) for k in cfg.grid.points])
    rows = [(float(k), float(h.real), float(h.imag)) for k, h in zip(cfg.grid.points, H)]
    _write_csv(out / "hamiltonian.csv", ["k [1/length]", "re <k|H|k> [energy]", "im <k|H|k> [energy]"], rows)
    report: dict[str, Any] = {"limit": limit, "order": order, "m_r": cfg.m_r, "index": index}
    if cfg.eta is not None and cfg.dimension == 1:
        build = G.decoherence_kernel_heavy_target if limit == G.HEAVY_TARGET else G.decoherence_kernel_heavy_particle
        pk = p["packet"] or {"center": float(p["wavenumbers"][0]), "width": 0.2}
        psi = G.momentum_packet(cfg.grid, pk["center"], pk["width"])
        rho = np.outer(psi, psi.conj())
        conv = []
        for eta in (cfg.eta, cfg.eta / 2):
            try:
                kern = build(_gas_config(p, base, eta))
            except ValueError as exc:
                conv.append({"eta": eta, "skipped": str(exc)})
                continue
            conv.append({"eta": eta, "loss_at_packet": float(np.real(np.vdot(psi, kern.loss() * psi))),
                         "energy_drift": kern.energy_drift(rho, cfg.m1)})
            if eta == cfg.eta:
                _write_csv(out / "kernel_loss.csv", ["k [1/length]", "scattering rate [energy]"],
                           [(float(k), float(g)) for k, g in zip(cfg.grid.points, kern.loss())])
        report["eta_convergence"] = conv
    _write_json(out / "report.json", report)
    return report


def run_young(p: dict, out: Path, seed: int) -> dict:
    k = float(p["wavenumber"])
    kp = complex(p["re_index"] * k, p["im_k_prime_L"] / p["screen_distance"])
    base = Y.YoungConfig(p["slit_separation"], p["screen_distance"], k, kp, window_periods=p["window_periods"])
    half = 0.5 * base.window_periods * base.fringe_period
    cfg = Y.YoungConfig(p["slit_separation"], p["screen_distance"], k, kp,
                        np.linspace(-half, half, p["screen_points"]), p["window_periods"])
    I = Y.pattern(cfg)
    Y.write_pattern_csv(out / "pattern.csv", cfg, I)
    vis = Y.visibility(I)
    Y.write_visibility_json(out / "visibility.json", cfg, vis)
    report = {
        "visibility": vis.to_json(),
        "formula": _finite(Y.visibility_formula(p["im_k_prime_L"])),
        "fringe_spacing": Y.fringe_spacing(I, cfg.screen_points),
        "fringe_period": cfg.fringe_period,
        "total_intensity": float(I.sum() * cfg.spacing),
    }
    if p["sweep"]:
        report["sweep"] = Y.visibility_sweep(cfg, p["sweep"])
    _write_json(out / "report.json", report)
    return report


RUNNERS = {
    "toy": run_toy,
    "slab-convergence": run_slab_convergence,
    "lindblad": run_lindblad,
    "gas": run_gas,
    "young": run_young,
}


def run(path, output_dir=None, seed=None, timestamp: str | None = None) -> tuple[int, Path | None]:
    """Run a config; returns ``(exit status, output directory)``."""
    violations = validate_config(path)
    errors = [v for v in violations if v["level"] == "error"]
    for v in violations:
        (log.error if v["level"] == "error" else log.warning)("%s: %s", v["field"], v["message"])
    if errors:
        return 2, None
    data = load_config(path)
    _, params = _schema_check(data)
    scenario = data["scenario"]
    seed = int(data.get("seed", 0) if seed is None else seed)
    root = Path(output_dir or data.get("output_dir", "runs"))
    stamp = timestamp or time.strftime("%Y%m%dT%H%M%S")
    out = root / f"{scenario}-{stamp}"
    out.mkdir(parents=True, exist_ok=True)
    base = Path(path).parent
    try:
        runner = RUNNERS[scenario]
        report = runner(params, out, seed, base) if scenario == "gas" else runner(params, out, seed)
    except (FloatingPointError, np.linalg.LinAlgError, ValueError) as exc:
        _write_json(out / "diagnostics.json", {"scenario": scenario, "error": type(exc).__name__,
                                              "message": str(exc), "parameters": params})
        log.error("numerical failure: %s (diagnostics in %s)", exc, out)
        return 3, out
    log.info("%s: wrote %s", scenario, out)
    log.debug("%s", json.dumps(report, default=_json_default))
    return 0, out


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="medium-decoherence", description=__doc__.split("\n")[0])
    parser.add_argument("--quiet", action="store_true", help="only report errors")
    sub = parser.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="run a scenario config")
    r.add_argument("config")
    r.add_argument("--output-dir", default=None)
    r.add_argument("--seed", type=int, default=None)
    r.add_argument("--quiet", action="store_true", default=argparse.SUPPRESS)
    v = sub.add_parser("validate", help="check a config without running it")
    v.add_argument("config")
    v.add_argument("--quiet", action="store_true", default=argparse.SUPPRESS)
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.ERROR if args.quiet else logging.INFO, format="%(levelname)s %(message)s")
    if args.command == "validate":
        violations = validate_config(args.config)
        json.dump(violations, sys.stdout, indent=2)
        sys.stdout.write("\n")
        return 2 if any(x["level"] == "error" for x in violations) else 0
    status, out = run(args.config, args.output_dir, args.seed)
    if out is not None and not args.quiet:
        print(out)
    return status


if __name__ == "__main__":
    sys.exit(main())
