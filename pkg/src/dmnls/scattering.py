"""Profile variables and extraction of the modified-scattering data.

For ``t >= T0`` the solution is written ``u(t) = M(Gamma) D(Gamma) w(t)``, i.e.

    w(t, xi) = (2i Gamma)^(1/2) exp(-i x^2 / 4 Gamma) u(t, x),   x = 2 Gamma xi.

``w`` is smoothly cut to frequencies below ``sqrt(t)`` (``w_tilde``), and the
non-integrable self-phase is removed by the unimodular gauge

    g(t) = exp(-i int_{T0}^t |w_tilde|^2 ds / 2Gamma(s)) w_tilde(t).

``g`` converges to ``W0``; the phase integral minus its ``log(t/T0)`` part
converges to ``Phi``; together they give the profile ``W`` in
``u ~ (2i Gamma)^(-1/2) exp(i x^2/4Gamma + i |W|^2 log t / 2<gamma>) W(x/2Gamma)``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field as dc_field

import numpy as np

from .spectral import Field, Grid, interpolate, project_low

__all__ = [
    "profile_grid",
    "to_profile_w",
    "cut_low",
    "GaugeState",
    "accumulate_gauge",
    "gauge",
    "compute_psi",
    "ScatteringTracker",
    "ScatteringProfile",
    "extract_profile",
    "asymptotic_field",
    "residual",
    "w_residual",
    "unwrapped_phase",
]


def profile_grid(xi_max: float, size: int = 512) -> Grid:
    return Grid(xi_max, size)


def _gamma(dmap, t: float) -> float:
    if t < dmap.T0:
        raise ValueError(f"profile variables need t >= T0 = {dmap.T0}, got t = {t}")
    return dmap.total(t)


def to_profile_w(f: Field, dmap, xi_grid: Grid | None = None) -> Field:
    """Strip the quadratic phase and the dilation from ``f``.

    Without ``xi_grid`` the result lives on the exact image ``x / 2Gamma`` of
    the spatial grid.  With ``xi_grid`` it is resampled there by
    trigonometric interpolation; points whose preimage ``2 Gamma xi`` leaves
    the spatial domain are set to zero.
    """
    gam = _gamma(dmap, f.time)
    g = f.grid
    root = np.sqrt(2j * gam)
    h = np.exp(-1j * g.x**2 / (4.0 * gam)) * f.values
    if xi_grid is None:
        return Field(Grid(g.half_width / (2.0 * gam), g.size), root * h, f.time)
    xs = 2.0 * gam * xi_grid.x
    vals = interpolate(f.replace(h), xs[0], xs[1] - xs[0], xi_grid.size)
    outside = (xs < -g.half_width) | (xs >= g.half_width)
    vals[outside] = 0.0
    return Field(xi_grid, root * vals, f.time)


def cut_low(w: Field, t: float) -> Field:
    """``P_{<= sqrt(t)} w``."""
    return project_low(w, np.sqrt(t))


@dataclass(frozen=True, eq=False)
class GaugeState:
    """Running phase ``int_{anchor}^t |w_tilde|^2 ds / 2Gamma(s)`` per xi."""

    phase_integral: np.ndarray
    last_time: float
    last_integrand: np.ndarray
    anchor: float

    @classmethod
    def start(cls, w_tilde: Field, dmap) -> "GaugeState":
        t = w_tilde.time
        dens = np.abs(w_tilde.values) ** 2 / (2.0 * _gamma(dmap, t))
        return cls(np.zeros_like(dens), t, dens, t)


def accumulate_gauge(state: GaugeState, w_tilde: Field, t_prev: float, t_next: float,
                     dmap) -> GaugeState:
    """Advance the phase integral from ``t_prev`` to ``t_next`` (trapezoid rule)."""
    if t_prev != state.last_time:
        raise ValueError(f"gauge state is at t={state.last_time}, not {t_prev}")
    if not t_next > t_prev:
        raise ValueError("gauge accumulation needs increasing times")
    dens = np.abs(w_tilde.values) ** 2 / (2.0 * _gamma(dmap, t_next))
    inc = 0.5 * (t_next - t_prev) * (state.last_integrand + dens)
    return GaugeState(state.phase_integral + inc, t_next, dens, state.anchor)


def gauge(w_tilde: Field, state: GaugeState) -> Field:
    """``g = exp(-i phase_integral) w_tilde``."""
    return w_tilde.replace(np.exp(-1j * state.phase_integral) * w_tilde.values)


def compute_psi(state: GaugeState, g: Field, avg: float) -> np.ndarray:
    """Phase integral with its leading ``|g|^2 log(t/T0) / 2<gamma>`` part removed."""
    lead = np.abs(g.values) ** 2 * np.log(state.last_time / state.anchor) / (2.0 * avg)
    return state.phase_integral - lead


class ScatteringTracker:
    """Observer that follows ``w``, ``w_tilde``, ``g`` and ``Psi`` from ``T0`` on.

    Call it with successive fields (it ignores fields before the anchor);
    the histories are kept in memory on the fixed profile grid.
    """

    def __init__(self, dmap, xi_grid: Grid, anchor: float | None = None):
        self.dmap = dmap
        self.xi_grid = xi_grid
        self.anchor = dmap.T0 if anchor is None else float(anchor)
        if self.anchor < dmap.T0:
            raise ValueError("anchor must not precede T0")
        self.state: GaugeState | None = None
        self.times: list[float] = []
        self.w: list[np.ndarray] = []
        self.w_tilde: list[np.ndarray] = []
        self.g: list[np.ndarray] = []
        self.psi: list[np.ndarray] = []
        self.outside_mass: list[float] = []

    @property
    def avg(self) -> float:
        return self.dmap.average

    def __call__(self, f: Field):
        t = f.time
        if t < self.anchor:
            return None
        w = to_profile_w(f, self.dmap, self.xi_grid)
        wt = cut_low(w, t)
        if self.state is None:
            if t != self.anchor:
                warnings.warn(f"gauge anchored at first observation t={t}", RuntimeWarning)
                self.anchor = t
            self.state = GaugeState.start(wt, self.dmap)
        else:
            self.state = accumulate_gauge(self.state, wt, self.state.last_time, t, self.dmap)
        gf = gauge(wt, self.state)
        self.times.append(t)
        self.w.append(w.values)
        self.w_tilde.append(wt.values)
        self.g.append(gf.values)
        self.psi.append(compute_psi(self.state, gf, self.avg))
        # mass of u beyond the spatial image of the profile window
        reach = 2.0 * self.dmap.total(t) * self.xi_grid.half_width
        dens = np.abs(f.values) ** 2
        tot = dens.sum()
        self.outside_mass.append(float(dens[np.abs(f.grid.x) > reach].sum() / tot) if tot else 0.0)
        return None

    def index(self, t: float) -> int:
        i = int(np.argmin(np.abs(np.asarray(self.times) - t)))
        if abs(self.times[i] - t) > 1e-9:
            raise KeyError(f"no observation at t={t}")
        return i


@dataclass(eq=False)
class ScatteringProfile:
    xi_grid: Grid
    W0: np.ndarray
    Phi: np.ndarray
    W: np.ndarray
    T0: float
    avg: float
    window: tuple
    diagnostics: dict = dc_field(default_factory=dict)

    @property
    def xi(self) -> np.ndarray:
        return self.xi_grid.x

    def to_dict(self, meta: dict | None = None) -> dict:
        m = {"T0": self.T0, "avg": self.avg, "window": list(self.window),
             "xi_max": self.xi_grid.half_width, "xi_points": self.xi_grid.size}
        m.update(self.diagnostics)
        if meta:
            m.update(meta)
        return {
            "xi": self.xi.tolist(),
            "W0_re": self.W0.real.tolist(),
            "W0_im": self.W0.imag.tolist(),
            "Phi": np.asarray(self.Phi, dtype=float).tolist(),
            "W_re": self.W.real.tolist(),
            "W_im": self.W.imag.tolist(),
            "meta": m,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ScatteringProfile":
        m = d["meta"]
        grid = Grid(m["xi_max"], m["xi_points"])
        W0 = np.asarray(d["W0_re"]) + 1j * np.asarray(d["W0_im"])
        W = np.asarray(d["W_re"]) + 1j * np.asarray(d["W_im"])
        diag = {k: v for k, v in m.items()
                if k not in ("T0", "avg", "window", "xi_max", "xi_points")}
        return cls(grid, W0, np.asarray(d["Phi"], dtype=float), W, m["T0"], m["avg"],
                   tuple(m["window"]), diag)


def _time_average(times, rows):
    t = np.asarray(times)
    y = np.asarray(rows)
    if len(t) == 1:
        return y[0]
    return np.trapezoid(y, t, axis=0) / (t[-1] - t[0])


def extract_profile(log: ScatteringTracker, window) -> ScatteringProfile:
    """Tail-window averages of ``g`` and ``Psi`` and the assembled profile ``W``.

    ``W = exp(i [Phi - |W0|^2 log(T0) / 2<gamma>]) W0``.
    """
    t_a, t_b = float(window[0]), float(window[1])
    if t_b - t_a < 1.0:
        raise ValueError("extraction window must span at least one dispersion period")
    if t_a < max(log.anchor, 10.0):
        raise ValueError(f"window must start at or after max(T0, 10) = {max(log.anchor, 10.0)}")
    times = np.asarray(log.times)
    if not len(times) or t_b > times[-1] + 1e-9:
        raise ValueError("window extends beyond the recorded run")
    sel = (times >= t_a - 1e-9) & (times <= t_b + 1e-9)
    ts = times[sel]
    g = np.asarray(log.g)[sel]
    psi = np.asarray(log.psi)[sel]
    W0 = _time_average(ts, g)
    Phi = _time_average(ts, psi)
    W = np.exp(1j * (Phi - np.abs(W0) ** 2 * np.log(log.anchor) / (2.0 * log.avg))) * W0
    drift = float(np.max(np.abs(g - W0))) if len(ts) else 0.0
    peak = float(np.max(np.abs(W0)))
    if peak > 0 and drift > 0.1 * peak:
        warnings.warn(f"g drifts by {drift / peak:.1%} of its peak inside the window",
                      RuntimeWarning, stacklevel=2)
    diag = {
        "drift": drift,
        "phi_drift": float(np.max(np.abs(psi - Phi))) if len(ts) else 0.0,
        "samples": int(len(ts)),
        "outside_mass": float(max(np.asarray(log.outside_mass)[sel], default=0.0)),
    }
    return ScatteringProfile(log.xi_grid, W0, Phi, W, log.anchor, log.avg, (t_a, t_b), diag)


def asymptotic_field(profile: ScatteringProfile, t: float, grid: Grid, dmap) -> Field:
    """Leading-order asymptotic solution built from ``profile`` at time ``t``."""
    gam = _gamma(dmap, t)
    pg = profile.xi_grid
    xi = grid.x / (2.0 * gam)
    Wx = interpolate(Field(pg, profile.W), xi[0], xi[1] - xi[0], grid.size)
    Wx[(xi < -pg.half_width) | (xi >= pg.half_width)] = 0.0
    # profile mass the spatial grid cannot represent
    dens = np.abs(profile.W) ** 2
    tot = dens.sum()
    if tot > 0:
        uncovered = (pg.x < xi[0]) | (pg.x > xi[-1])
        if dens[uncovered].sum() > 1e-8 * tot:
            warnings.warn("profile support exceeds the image of the spatial grid",
                          RuntimeWarning, stacklevel=2)
    phase = grid.x**2 / (4.0 * gam) + np.abs(Wx) ** 2 * np.log(t) / (2.0 * profile.avg)
    vals = np.exp(1j * phase) * Wx / np.sqrt(2j * gam)
    return Field(grid, vals, t)


def residual(u: Field, profile: ScatteringProfile, dmap) -> float:
    """``||u - asymptotic_field||_inf`` on the grid of ``u``."""
    approx = asymptotic_field(profile, u.time, u.grid, dmap)
    return float(np.max(np.abs(u.values - approx.values)))


def w_residual(w: np.ndarray, profile: ScatteringProfile, t: float) -> float:
    """``||w(t) - exp(i |W|^2 log t / 2<gamma>) W||_inf`` on the profile grid."""
    W = profile.W
    model = np.exp(1j * np.abs(W) ** 2 * np.log(t) / (2.0 * profile.avg)) * W
    return float(np.max(np.abs(np.asarray(w) - model)))


def unwrapped_phase(samples) -> np.ndarray:
    """Phase of a complex time series, continued to the nearest branch.

    Unreliable when the modulus passes near zero.
    """
    return np.unwrap(np.angle(np.asarray(samples)))
