"""Command-line entry point: ``dmnls <subcommand> --config run.toml``."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from ..scattering import ScatteringTracker, extract_profile, profile_grid
from ..solver import SolverAbort
from . import io
from .config import RunConfig, load_config
from .experiments import compare_solvers, run_simulation, verify_identities
from .fitting import fit_power_law

IDENTITY_TOL = 1e-6


def _config(args) -> RunConfig:
    cfg = load_config(args.config) if args.config else RunConfig()
    return cfg.replace(epsilon=args.epsilon, t_max=args.tmax, solver=args.solver,
                       output_dir=args.output)


def _emit(obj) -> None:
    json.dump(obj, sys.stdout, indent=1)
    sys.stdout.write("\n")


def cmd_simulate(args) -> int:
    cfg = _config(args)
    res = run_simulation(cfg)
    summary = {"output_dir": cfg.output_dir, "mass_drift": res.log.mass_drift}
    if cfg.epsilon > 0:
        summary["decay_fit"] = res.decay_fit()._asdict()
    _emit(summary)
    return 0


def cmd_fit_decay(args) -> int:
    cfg = _config(args)
    norms = io.read_norms_csv(Path(cfg.output_dir) / "norms.csv", cfg.delta)
    a = norms.arrays()
    t_min = cfg.fit_t_min if args.t_min is None else args.t_min
    fit = fit_power_law(a["times"], a["sup"], t_min, cfg.t_max)
    io.write_json(Path(cfg.output_dir) / "decay_fit.json", {**fit._asdict(), "t_min": t_min})
    _emit(fit._asdict())
    return 0


class _StoredHistory:
    # minimal stand-in for a tracker, rebuilt from history.npz
    def __init__(self, path, cfg: RunConfig):
        data = np.load(path)
        self.times = data["times"].tolist()
        self.g = data["g"]
        self.psi = data["psi"]
        self.outside_mass = data["outside_mass"]
        self.anchor = float(data["anchor"])
        self.xi_grid = profile_grid(float(data["xi_max"]), self.g.shape[1])
        self.avg = cfg.dispersion_map.average


def cmd_extract_profile(args) -> int:
    cfg = _config(args)
    if args.window:
        cfg = cfg.replace(window_start=args.window[0], window_end=args.window[1])
    out = Path(cfg.output_dir)
    hist = _StoredHistory(out / "history.npz", cfg)
    profile = extract_profile(hist, cfg.window)
    meta = {"gamma_plus": cfg.gamma_plus, "gamma_minus": cfg.gamma_minus,
            "epsilon": cfg.epsilon, "delta": cfg.delta, "solver": cfg.solver,
            "family": cfg.family, "truncated": False}
    io.write_profile_json(out / "profile.json", profile, meta)
    _emit({"window": list(cfg.window), **profile.diagnostics})
    return 0


def cmd_verify_identities(args) -> int:
    res = verify_identities(args.count, args.seed)
    worst = {k: max(v) for k, v in res.items()}
    _emit({"max_residual": worst, "tolerance": IDENTITY_TOL})
    return 0 if all(v < IDENTITY_TOL for v in worst.values()) else 1


def cmd_compare(args) -> int:
    cfg = _config(args)
    report = compare_solvers(cfg)
    report.pop("_results")
    _emit({name: m.get("decay_fit") for name, m in report["models"].items()})
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="dmnls", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, func, help):
        p = sub.add_parser(name, help=help)
        p.add_argument("--config", help="flat TOML run configuration")
        p.add_argument("--epsilon", type=float)
        p.add_argument("--tmax", type=float)
        p.add_argument("--solver", choices=("dmnls", "standard", "gt"))
        p.add_argument("--output", help="override output_dir")
        p.set_defaults(func=func)
        return p

    add("simulate", cmd_simulate, "evolve and write norms, profile and snapshots")
    p = add("fit-decay", cmd_fit_decay, "power-law fit of the sup norm from norms.csv")
    p.add_argument("--t-min", type=float)
    p = add("extract-profile", cmd_extract_profile, "re-extract the profile from history.npz")
    p.add_argument("--window", type=float, nargs=2, metavar=("T_A", "T_B"))
    p = add("verify-identities", cmd_verify_identities, "operator identity residuals")
    p.add_argument("--count", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    add("compare", cmd_compare, "managed vs averaged vs Gabitov-Turitsyn runs")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SolverAbort as exc:
        record = {"error": exc.reason, "time": exc.time, "message": str(exc)}
    except (ValueError, OSError, KeyError) as exc:
        record = {"error": type(exc).__name__, "message": str(exc)}
    json.dump(record, sys.stderr)
    sys.stderr.write("\n")
    out = getattr(args, "output", None)
    if out is None and getattr(args, "config", None):
        try:
            out = load_config(args.config).output_dir
        except (ValueError, OSError):
            out = None
    if out:
        Path(out).mkdir(parents=True, exist_ok=True)
        io.write_json(Path(out) / "error.json", record)
    return 2


if __name__ == "__main__":
    sys.exit(main())
