"""Command-line front end.

Subcommands:
  eigen            tabulate Landau levels on the cylinder (CSV)
  run              one cyclic transport experiment (JSON + CSV row)
  sweep            Berry phase vs threading flux (CSV + fit JSON)
  adiabatic-study  phase/fidelity/factorization error vs drive duration
  verify           fast internal consistency checks

All outputs are deterministic for a fixed config and seed: files embed the
resolved config (never wall-clock data), floats are written with 17
significant digits, and worker count does not affect results.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from .core import ConfigError, CylinderGrid, PhysicsConfig, Wavefunction
from .eigenstates import eigen_table, landau_energy
from .experiments import (
    ExperimentResult,
    adiabatic_study,
    flux_sweep,
    run_ab_loop,
    run_fig1_comparison,
    run_general_loop,
)
from .propagator import apply_hamiltonian
from .verify import run_all_checks

__all__ = ["main", "DEFAULT_CONFIG", "resolve_config"]

DEFAULT_CONFIG = {
    "physics": {
        "hbar": 1.0,
        "q": 1.0,
        "m": 1.0,
        "c": 1.0,
        "B": 1.0,
        "phi0": math.pi / 2,
        "l": 2 * math.pi,
    },
    "grid": {"Nx": 64, "Ny": 512, "y_min": -12.0, "y_max": 12.0},
    "experiment": {
        "kind": "ab_loop",
        "T": 200.0,
        "dt": None,
        "n": 0,
        "j": 0,
        "ramp_fraction": 0.1,
        "min_fidelity": 0.99,
        "winding": 1,
        "height": 0.5,
        "phi_B": math.pi / 2,
    },
    "sweep": {"phi_min": 0.0, "phi_max": 4 * math.pi, "num": 17},
    "study": {"T_values": [25.0, 50.0, 100.0, 200.0]},
    "eigen": {"n_max": 2, "j_max": 2},
}

_EXPERIMENT_KINDS = ("ab_loop", "general_loop", "fig1")


def _fail(path: str, msg: str) -> ConfigError:
    return ConfigError(f"{path}: {msg}")


def _as_number(path: str, value, *, integer=False, allow_none=False):
    if value is None:
        if allow_none:
            return None
        raise _fail(path, "required key missing or null")
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise _fail(path, f"expected a number, got {type(value).__name__}")
    if integer:
        if isinstance(value, float) and not value.is_integer():
            raise _fail(path, f"expected an integer, got {value!r}")
        return int(value)
    v = float(value)
    if not math.isfinite(v):
        raise _fail(path, "must be finite")
    return v


def _section(raw: dict, name: str, default: dict, required_keys=()) -> dict:
    sect = raw.get(name, None)
    if sect is None:
        sect = {}
    if not isinstance(sect, dict):
        raise _fail(name, f"expected an object, got {type(sect).__name__}")
    for key in sect:
        if key not in default:
            raise _fail(f"{name}.{key}", "unknown key")
    for key in required_keys:
        if key not in sect:
            raise _fail(f"{name}.{key}", "required key missing")
    merged = dict(default)
    merged.update(sect)
    return merged


def resolve_config(raw: dict) -> dict:
    """Validate a raw config dict and fill optional sections with defaults.

    The physics and grid sections, when a config is supplied, must be
    complete: silent defaults for the fields that define the problem are a
    recipe for comparing incomparable runs.  Experiment, sweep, study, and
    eigen sections merge with the defaults key by key.
    """
    if not isinstance(raw, dict):
        raise ConfigError(f"config root: expected an object, got {type(raw).__name__}")
    for key in raw:
        if key not in DEFAULT_CONFIG:
            raise _fail(key, "unknown section")

    phys_required = tuple(DEFAULT_CONFIG["physics"]) if "physics" in raw else ()
    grid_required = tuple(DEFAULT_CONFIG["grid"]) if "grid" in raw else ()

    phys = _section(raw, "physics", DEFAULT_CONFIG["physics"], phys_required)
    for key in phys:
        phys[key] = _as_number(f"physics.{key}", phys[key])

    grid = _section(raw, "grid", DEFAULT_CONFIG["grid"], grid_required)
    grid["Nx"] = _as_number("grid.Nx", grid["Nx"], integer=True)
    grid["Ny"] = _as_number("grid.Ny", grid["Ny"], integer=True)
    grid["y_min"] = _as_number("grid.y_min", grid["y_min"])
    grid["y_max"] = _as_number("grid.y_max", grid["y_max"])
    if grid["y_min"] >= grid["y_max"]:
        raise _fail("grid.y_min", "must be strictly below grid.y_max")

    exp = _section(raw, "experiment", DEFAULT_CONFIG["experiment"])
    if exp["kind"] not in _EXPERIMENT_KINDS:
        raise _fail("experiment.kind", f"must be one of {_EXPERIMENT_KINDS}")
    exp["T"] = _as_number("experiment.T", exp["T"])
    if exp["T"] <= 0:
        raise _fail("experiment.T", "must be positive")
    exp["dt"] = _as_number("experiment.dt", exp["dt"], allow_none=True)
    if exp["dt"] is not None and exp["dt"] <= 0:
        raise _fail("experiment.dt", "must be positive when set")
    exp["n"] = _as_number("experiment.n", exp["n"], integer=True)
    if exp["n"] < 0:
        raise _fail("experiment.n", "must be non-negative")
    exp["j"] = _as_number("experiment.j", exp["j"], integer=True)
    exp["ramp_fraction"] = _as_number("experiment.ramp_fraction", exp["ramp_fraction"])
    if not 0.0 <= exp["ramp_fraction"] <= 0.5:
        raise _fail("experiment.ramp_fraction", "must lie in [0, 0.5]")
    exp["min_fidelity"] = _as_number("experiment.min_fidelity", exp["min_fidelity"])
    if not 0.0 <= exp["min_fidelity"] <= 1.0:
        raise _fail("experiment.min_fidelity", "must lie in [0, 1]")
    exp["winding"] = _as_number("experiment.winding", exp["winding"], integer=True)
    if exp["winding"] == 0:
        raise _fail("experiment.winding", "must be a nonzero integer")
    exp["height"] = _as_number("experiment.height", exp["height"])
    exp["phi_B"] = _as_number("experiment.phi_B", exp["phi_B"])
    if exp["phi_B"] < 0:
        raise _fail("experiment.phi_B", "must be non-negative")

    swp = _section(raw, "sweep", DEFAULT_CONFIG["sweep"])
    swp["phi_min"] = _as_number("sweep.phi_min", swp["phi_min"])
    swp["phi_max"] = _as_number("sweep.phi_max", swp["phi_max"])
    swp["num"] = _as_number("sweep.num", swp["num"], integer=True)
    if swp["num"] < 2:
        raise _fail("sweep.num", "need at least two flux points")
    if swp["phi_min"] >= swp["phi_max"]:
        raise _fail("sweep.phi_min", "must be strictly below sweep.phi_max")

    study = _section(raw, "study", DEFAULT_CONFIG["study"])
    values = study["T_values"]
    if not isinstance(values, (list, tuple)) or not values:
        raise _fail("study.T_values", "expected a non-empty list of durations")
    study["T_values"] = [
        _as_number(f"study.T_values[{i}]", v) for i, v in enumerate(values)
    ]
    for i, v in enumerate(study["T_values"]):
        if v <= 0:
            raise _fail(f"study.T_values[{i}]", "must be positive")

    eig = _section(raw, "eigen", DEFAULT_CONFIG["eigen"])
    eig["n_max"] = _as_number("eigen.n_max", eig["n_max"], integer=True)
    eig["j_max"] = _as_number("eigen.j_max", eig["j_max"], integer=True)
    if eig["n_max"] < 0 or eig["j_max"] < 0:
        raise _fail("eigen.n_max", "n_max and j_max must be non-negative")

    return {"physics": phys, "grid": grid, "experiment": exp, "sweep": swp,
            "study": study, "eigen": eig}


def build_physics(conf: dict) -> PhysicsConfig:
    p = conf["physics"]
    try:
        return PhysicsConfig(
            hbar=p["hbar"], q=p["q"], m=p["m"], c=p["c"],
            B=p["B"], phi0=p["phi0"], l=p["l"],
        )
    except ConfigError as exc:
        raise ConfigError(f"physics: {exc}") from None


def build_grid(conf: dict, cfg: PhysicsConfig) -> CylinderGrid:
    g = conf["grid"]
    try:
        return CylinderGrid.for_config(
            cfg, Nx=g["Nx"], Ny=g["Ny"], y_min=g["y_min"], y_max=g["y_max"]
        )
    except ConfigError as exc:
        raise ConfigError(f"grid: {exc}") from None


def _config_line(conf: dict) -> str:
    return json.dumps(conf, sort_keys=True, separators=(",", ":"))


def _fmt_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return "%.17g" % float(value)
    return str(value)


def write_csv(path: Path, columns, rows, conf: dict) -> None:
    lines = [f"# config: {_config_line(conf)}", ",".join(columns)]
    for row in rows:
        lines.append(",".join(_fmt_cell(v) for v in row))
    path.write_text("\n".join(lines) + "\n")


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    return obj


def write_json(path: Path, payload: dict, conf: dict) -> None:
    payload = dict(payload)
    payload["config"] = conf
    path.write_text(json.dumps(_jsonable(payload), indent=2, sort_keys=True) + "\n")


def _result_report(tag: str, res: ExperimentResult) -> str:
    err = abs((res.gamma_measured - res.gamma_predicted + math.pi) % (2 * math.pi) - math.pi)
    return (
        f"{tag}: gamma = {res.gamma_measured:+.6f}  predicted {res.gamma_predicted:+.6f}  "
        f"|diff| = {err:.2e}  fidelity = {res.fidelity:.6f}"
    )


def cmd_eigen(conf: dict, out: Path, args) -> int:
    cfg = build_physics(conf)
    grid = build_grid(conf, cfg)
    table = eigen_table(cfg, grid, conf["eigen"]["n_max"], conf["eigen"]["j_max"])
    rows = []
    for entry in table:
        psi = entry.build(cfg, grid)
        hpsi = apply_hamiltonian(psi, cfg)
        resid = Wavefunction(
            grid, hpsi.amplitudes - entry.energy * psi.amplitudes, psi.mode_offset
        ).norm()
        rows.append((entry.n, entry.j, entry.kappa, entry.y_center, entry.energy, resid))
    write_csv(out / "eigen.csv", ("n", "j", "kappa", "y_center", "energy", "residual"), rows, conf)
    print(f"wrote {out / 'eigen.csv'} ({len(rows)} states)")
    worst = max(r[-1] for r in rows)
    print(f"worst eigen-residual: {worst:.3e}")
    return 0


def _run_experiment(conf: dict, cfg: PhysicsConfig, grid: CylinderGrid):
    e = conf["experiment"]
    common = dict(T=e["T"], n=e["n"], j=e["j"], dt=e["dt"],
                  ramp_fraction=e["ramp_fraction"], min_fidelity=e["min_fidelity"])
    if e["kind"] == "ab_loop":
        return [run_ab_loop(cfg, grid, winding=e["winding"], **common)]
    if e["kind"] == "general_loop":
        return [run_general_loop(cfg, grid, height=e["height"], **common)]
    pair = run_fig1_comparison(
        cfg, grid, phi_B=e["phi_B"], T=e["T"], n=e["n"], j=e["j"], dt=e["dt"],
        min_fidelity=e["min_fidelity"],
    )
    return [pair.blue, pair.green]


def cmd_run(conf: dict, out: Path, args) -> int:
    cfg = build_physics(conf)
    grid = build_grid(conf, cfg)
    results = _run_experiment(conf, cfg, grid)
    write_csv(out / "run.csv", ExperimentResult.CSV_COLUMNS,
              [r.csv_row() for r in results], conf)
    write_json(out / "run.json", {"results": [r.to_dict() for r in results]}, conf)
    for r in results:
        print(_result_report(r.kind, r))
    print(f"wrote {out / 'run.csv'}, {out / 'run.json'}")
    return 0


def cmd_sweep(conf: dict, out: Path, args) -> int:
    cfg = build_physics(conf)
    grid = build_grid(conf, cfg)
    e, s = conf["experiment"], conf["sweep"]
    phis = np.linspace(s["phi_min"], s["phi_max"], s["num"])
    sweep = flux_sweep(
        cfg, grid, phis, T=e["T"], n=e["n"], j=e["j"], dt=e["dt"],
        ramp_fraction=e["ramp_fraction"], threads=args.threads,
        min_fidelity=e["min_fidelity"],
    )
    write_csv(out / "sweep.csv", ExperimentResult.CSV_COLUMNS,
              [r.csv_row() for r in sweep.rows], conf)
    write_json(out / "sweep.json", {
        "slope": sweep.slope,
        "intercept": sweep.intercept,
        "rows": [r.to_dict() for r in sweep.rows],
    }, conf)
    failures = [r for r in sweep.rows if r.error is not None]
    print(f"sweep over {len(sweep.rows)} flux points: slope = {sweep.slope:.9f} "
          f"(ideal {cfg.q / (cfg.hbar * cfg.c):.9f}), {len(failures)} failed rows")
    print(f"wrote {out / 'sweep.csv'}, {out / 'sweep.json'}")
    return 0 if not failures else 1


def cmd_study(conf: dict, out: Path, args) -> int:
    cfg = build_physics(conf)
    grid = build_grid(conf, cfg)
    e = conf["study"]
    exp = conf["experiment"]
    study = adiabatic_study(
        cfg, grid, e["T_values"], n=exp["n"], j=exp["j"], dt=exp["dt"],
        ramp_fraction=exp["ramp_fraction"],
    )
    columns = ("T", "gamma_error", "infidelity", "gamma_raw_error", "discrepancy_norm")
    rows = [(r.T, r.gamma_error, r.infidelity, r.gamma_raw_error, r.discrepancy_norm)
            for r in study.rows]
    write_csv(out / "study.csv", columns, rows, conf)
    write_json(out / "study.json", {
        "rows": [
            {
                "T": r.T,
                "gamma_error": r.gamma_error,
                "infidelity": r.infidelity,
                "gamma_raw_error": r.gamma_raw_error,
                "discrepancy_norm": r.discrepancy_norm,
                "result": r.result.to_dict(),
            }
            for r in study.rows
        ],
    }, conf)
    for r in study.rows:
        print(f"T = {r.T:9.2f}: gamma_error = {r.gamma_error:.3e}  "
              f"infidelity = {r.infidelity:.3e}  "
              f"raw_error = {r.gamma_raw_error:.3e}  "
              f"factorization gap = "
              + (f"{r.discrepancy_norm:.3e}" if r.discrepancy_norm is not None else "n/a"))
    print(f"wrote {out / 'study.csv'}, {out / 'study.json'}")
    return 0


def cmd_verify(conf: dict, out: Path, args) -> int:
    results = run_all_checks(seed=args.seed)
    width = max(len(name) for name, _, _ in results)
    for name, ok, detail in results:
        print(f"{name:<{width}}  {'PASS' if ok else 'FAIL'}  {detail}")
    write_json(out / "verify.json", {
        "seed": args.seed,
        "checks": [
            {"name": name, "passed": ok, "detail": detail}
            for name, ok, detail in results
        ],
    }, conf)
    failed = [name for name, ok, _ in results if not ok]
    print(f"{len(results) - len(failed)}/{len(results)} checks passed")
    return 0 if not failed else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="landau-cylinder",
        description="Driven Landau states on a flux-threaded cylinder.",
    )
    parser.add_argument("--config", type=Path, default=None,
                        help="JSON config file (defaults are used when omitted)")
    parser.add_argument("--out", type=Path, default=Path("."),
                        help="output directory (created if missing)")
    parser.add_argument("--threads", type=int, default=1,
                        help="worker processes for sweeps")
    parser.add_argument("--seed", type=int, default=0,
                        help="seed for the randomized verification checks")
    parser.add_argument("--print-default-config", action="store_true",
                        help="print the default config as JSON and exit")
    sub = parser.add_subparsers(dest="command")
    sub.add_parser("eigen", help="tabulate Landau levels (CSV)")
    sub.add_parser("run", help="run one transport experiment")
    sub.add_parser("sweep", help="Berry phase vs threading flux")
    sub.add_parser("adiabatic-study", help="convergence with drive duration")
    sub.add_parser("verify", help="internal consistency checks")
    return parser


_COMMANDS = {
    "eigen": cmd_eigen,
    "run": cmd_run,
    "sweep": cmd_sweep,
    "adiabatic-study": cmd_study,
    "verify": cmd_verify,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    if args.print_default_config:
        print(json.dumps(DEFAULT_CONFIG, indent=2, sort_keys=True))
        return 0
    if args.command is None:
        parser.print_help()
        return 2
    if args.threads < 1:
        print("error: --threads must be at least 1", file=sys.stderr)
        return 2

    raw = {}
    if args.config is not None:
        try:
            raw = json.loads(args.config.read_text())
        except FileNotFoundError:
            print(f"error: config file not found: {args.config}", file=sys.stderr)
            return 2
        except json.JSONDecodeError as exc:
            print(f"error: config is not valid JSON: {exc}", file=sys.stderr)
            return 2

    try:
        conf = resolve_config(raw)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    out = args.out
    out.mkdir(parents=True, exist_ok=True)

    try:
        return _COMMANDS[args.command](conf, out, args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
