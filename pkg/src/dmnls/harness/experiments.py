"""End-to-end runs: evolve, record norms, follow the gauge, extract the profile."""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from pathlib import Path

import numpy as np

from ..analysis import (NormSeries, chain_rule_residual, commutation_residual,
                        record_norms, sigma_norm)
from ..dispersion import DispersionMap
from ..scattering import (ScatteringProfile, ScatteringTracker, extract_profile,
                          profile_grid)
from ..solver import EvolveLog, SolverAbort, StepControl, evolve, evolve_gt
from ..spectral import Field, Grid, free_propagate, mdfm_factorization
from . import io
from .config import RunConfig
from .fitting import PowerLawFit, fit_power_law


def initial_data(config: RunConfig, grid: Grid | None = None) -> Field:
    """Initial field of the configured family with Sigma norm ``epsilon``."""
    grid = config.grid if grid is None else grid
    x = grid.x
    fam = config.family
    if fam == "gaussian":
        v = np.pi**-0.25 * np.exp(-x**2 / 2)
    elif fam == "chirped_gaussian":
        v = np.pi**-0.25 * np.exp(-x**2 / 2 + 1j * config.chirp * x**2)
    elif fam == "double_bump":
        s = 0.5 * config.separation
        v = np.exp(-(x - s) ** 2 / 2) + np.exp(-(x + s) ** 2 / 2)
    else:
        rng = np.random.default_rng(config.seed)
        v = np.zeros_like(x, dtype=complex)
        for _ in range(3):
            c, w = rng.uniform(-3, 3), rng.uniform(0.7, 1.5)
            amp = rng.normal() + 1j * rng.normal()
            v = v + amp * np.exp(-((x - c) / w) ** 2 / 2 + 1j * rng.uniform(-1, 1) * x)
    f = Field(grid, v, 0.0)
    if config.epsilon == 0:
        return f.replace(np.zeros(grid.size, dtype=complex))
    return f.replace(f.values * (config.epsilon / sigma_norm(f)))


def dyadic_times(T0: float, t_max: float) -> list[float]:
    out, t = [], T0
    while t <= t_max + 1e-9:
        out.append(t)
        t *= 2.0
    return out


@dataclass
class RunResult:
    config: RunConfig
    final: Field | None
    norms: NormSeries
    tracker: ScatteringTracker
    log: EvolveLog | None
    profile: ScatteringProfile | None = None
    snapshots: dict = dc_field(default_factory=dict)
    truncated: bool = False
    error: dict | None = None

    def decay_fit(self, t_min: float | None = None, t_max: float | None = None) -> PowerLawFit:
        a = self.norms.arrays()
        lo = self.config.fit_t_min if t_min is None else t_min
        hi = self.config.t_max if t_max is None else t_max
        return fit_power_law(a["times"], a["sup"], lo, hi)


def _solve(config: RunConfig, u0: Field, observers, extra_times):
    control = StepControl(config.dt, config.dealias)
    kw = dict(coeff=config.nonlinear_coeff, obs_interval=config.obs_interval,
              extra_times=extra_times, monitor_threshold=config.monitor_threshold)
    if config.solver == "gt":
        return evolve_gt(u0, config.t_max, control, config.gt_map, config.gt_nodes,
                         observers, **kw)
    return evolve(u0, config.t_max, control, config.linear_dispersion, observers, **kw)


def run_simulation(config: RunConfig, write: bool = True) -> RunResult:
    """Evolve, record norms on the observation lattice and extract the profile.

    With ``write=True`` the artifacts go to ``config.output_dir``: ``norms.csv``,
    ``profile.json``, ``history.npz``, ``run.json`` and binary snapshots of ``u``
    and ``w`` at the dyadic times ``T0, 2 T0, ...``.  A solver abort still
    flushes the partial norms with ``truncated: true`` and then re-raises.
    """
    dmap = config.dispersion_map
    lin = config.linear_dispersion
    u0 = initial_data(config)
    norms = NormSeries(delta=config.delta)
    T0 = dmap.T0
    tracker = ScatteringTracker(lin, profile_grid(config.xi_max, config.xi_points), anchor=T0)
    dyadic = dyadic_times(T0, config.t_max)
    snaps: dict = {}

    def snapshot(f: Field):
        if any(abs(f.time - d) < 1e-9 for d in dyadic) and tracker.times and tracker.times[-1] == f.time:
            w = Field(tracker.xi_grid, tracker.w[-1], f.time)
            snaps[f.time] = (f, w)

    observers = [lambda f: record_norms(f, norms, lin), tracker]
    if config.snapshots:
        observers.append(snapshot)
    extra = [T0, *dyadic, *config.window]
    result = RunResult(config, None, norms, tracker, None, snapshots=snaps)
    try:
        final, log = _solve(config, u0, observers, extra)
    except SolverAbort as exc:
        result.log = exc.log
        result.truncated = True
        result.error = {"error": exc.reason, "time": exc.time, "message": str(exc)}
        if write:
            _write_outputs(result)
        raise
    result.final, result.log = final, log
    result.profile = extract_profile(tracker, config.window)
    if write:
        _write_outputs(result)
    return result


def _summary(result: RunResult) -> dict:
    cfg = result.config
    out = {"truncated": result.truncated, "config": cfg.to_dict()}
    if result.error:
        out["error"] = result.error
    if result.log is not None:
        out["mass_drift"] = result.log.mass_drift
        out["steps"] = len(result.log.steps)
        out["max_boundary_fraction"] = max(result.log.boundary_fraction, default=0.0)
    if not result.truncated and cfg.epsilon > 0:
        fit = result.decay_fit()
        out["decay_fit"] = fit._asdict()
    return out


def _write_outputs(result: RunResult) -> None:
    cfg = result.config
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    io.write_norms_csv(out / "norms.csv", result.norms)
    if result.profile is not None:
        meta = {"gamma_plus": cfg.gamma_plus, "gamma_minus": cfg.gamma_minus,
                "epsilon": cfg.epsilon, "delta": cfg.delta, "solver": cfg.solver,
                "family": cfg.family, "truncated": result.truncated}
        io.write_profile_json(out / "profile.json", result.profile, meta)
    if result.tracker.times:
        io.write_history(out / "history.npz", result.tracker)
    for t, (u, w) in sorted(result.snapshots.items()):
        io.write_field(out / f"u_t{t:g}.bin", u)
        io.write_field(out / f"w_t{t:g}.bin", w)
    if result.final is not None:
        io.write_field(out / "u_final.bin", result.final)
    io.write_json(out / "run.json", _summary(result))


def compare_solvers(config: RunConfig, write: bool = True) -> dict:
    """Run the managed, averaged-constant and Gabitov-Turitsyn models from one datum.

    Reports each model's sup-norm decay fit and extracted ``|W|``.  With
    ``dispersion = "constant"`` the managed model is skipped.
    """
    solvers = ["standard", "gt"] if config.dispersion == "constant" else ["dmnls", "standard", "gt"]
    report: dict = {"models": {}}
    results = {}
    for name in solvers:
        sub = config.replace(solver=name, output_dir=str(Path(config.output_dir) / name))
        res = run_simulation(sub, write=write)
        results[name] = res
        entry = {"mass_drift": res.log.mass_drift,
                 "W_abs": np.abs(res.profile.W).tolist() if res.profile is not None else None}
        if config.epsilon > 0:
            entry["decay_fit"] = res.decay_fit()._asdict()
        report["models"][name] = entry
    report["xi"] = results[solvers[0]].tracker.xi_grid.x.tolist()
    if "standard" in results and "gt" in results:
        a, b = results["standard"].final.values, results["gt"].final.values
        report["standard_vs_gt_sup"] = float(np.max(np.abs(a - b)))
    if write:
        out = Path(config.output_dir)
        out.mkdir(parents=True, exist_ok=True)
        io.write_json(out / "compare.json", report)
    report["_results"] = results
    return report


def smooth_corpus(n: int, seed: int = 0, grid: Grid | None = None) -> list[Field]:
    """Randomized smooth, well-localized test fields (chirped Gaussians)."""
    grid = Grid(64.0, 4096) if grid is None else grid
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(n):
        c = rng.uniform(-2, 2)
        w = rng.uniform(0.6, 1.5)
        amp = rng.uniform(0.2, 1.5) * np.exp(1j * rng.uniform(0, 2 * np.pi))
        k = rng.uniform(-1, 1)
        chirp = rng.uniform(-0.3, 0.3)
        x = grid.x
        out.append(Field(grid, amp * np.exp(-((x - c) / w) ** 2 / 2 + 1j * (k * x + chirp * x**2))))
    return out


def verify_identities(n: int = 20, seed: int = 0, dmap: DispersionMap | None = None) -> dict:
    """Residuals of the factorization, commutation and chain-rule identities."""
    dmap = DispersionMap(2.0, 1.0) if dmap is None else dmap
    rng = np.random.default_rng(seed + 1)
    corpus = smooth_corpus(n, seed)
    fact, comm, chain = [], [], []
    for f in corpus:
        a = rng.uniform(0.5, 3.0)
        p = free_propagate(f, a).values
        m = mdfm_factorization(f, a).values
        fact.append(float(np.max(np.abs(p - m)) / np.max(np.abs(p))))
        t, s, t0 = sorted(rng.uniform(0.0, 3.0, 3))[::-1]
        comm.append(commutation_residual(f, t, s, t0, dmap))
        chain.append(chain_rule_residual(f, t, t0, dmap))
    return {"factorization": fact, "commutation": comm, "chain_rule": chain}
