"""Vector-field algebra and the weighted norms used to monitor decay.

``J(t, t0) = x + 2i Gamma(t, t0) d/dx`` is the Galilean vector field adapted
to the time-dependent dispersion.  :class:`NormSeries` records the energy-type
quantities on the observation lattice and reports the running X and S norms.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field as dc_field

import numpy as np

from .spectral import Field, derivative, free_propagate, l2_norm

__all__ = [
    "japanese",
    "sigma_norm",
    "apply_vector_field",
    "chain_rule_residual",
    "commutation_residual",
    "NormSeries",
    "record_norms",
    "bootstrap_norms",
]


def japanese(s):
    """``<s> = (1 + s^2)^(1/2)``."""
    return np.sqrt(1.0 + np.square(s))


def sigma_norm(f: Field) -> float:
    """``||f||_2 + ||f'||_2 + ||x f||_2``."""
    return l2_norm(f) + l2_norm(derivative(f)) + l2_norm(f.replace(f.grid.x * f.values))


def _vector_field(f: Field, gam: float) -> np.ndarray:
    return f.grid.x * f.values + 2j * gam * derivative(f).values


def apply_vector_field(f: Field, t: float, t0: float, dmap) -> Field:
    """``J(t, t0) f`` with a spectral derivative."""
    xu = f.grid.x * f.values
    dens = np.abs(xu) ** 2
    total = dens.sum()
    if total > 0:
        outer = np.abs(f.grid.x) > 0.9 * f.grid.half_width
        if dens[outer].sum() > 1e-8 * total:
            warnings.warn("x*u carries mass near the boundary; J is unreliable",
                          RuntimeWarning, stacklevel=2)
    return f.replace(_vector_field(f, dmap.total(t, t0)))


def chain_rule_residual(f: Field, t: float, t0: float, dmap) -> float:
    """Sup-norm defect of ``J(|u|^2 u) = 2|u|^2 Ju - u^2 conj(Ju)``.

    Normalized by ``||u||_inf^2 ||Ju||_inf``; zero for the zero field.
    """
    u = f.values
    if not np.any(u):
        return 0.0
    gam = dmap.total(t, t0)
    ju = _vector_field(f, gam)
    lhs = _vector_field(f.replace(np.abs(u) ** 2 * u), gam)
    rhs = 2.0 * np.abs(u) ** 2 * ju - u**2 * np.conj(ju)
    scale = np.max(np.abs(u)) ** 2 * np.max(np.abs(ju))
    return float(np.max(np.abs(lhs - rhs)) / scale)


def commutation_residual(f: Field, t: float, s: float, t0: float, dmap) -> float:
    """Relative L2 gap in ``J(t,t0) e^{i Gamma(t,s) Lap} = e^{i Gamma(t,s) Lap} J(s,t0)``."""
    a = dmap.total(t, s)
    lhs = _vector_field(free_propagate(f, a), dmap.total(t, t0))
    rhs = free_propagate(f.replace(_vector_field(f, dmap.total(s, t0))), a).values
    denom = np.linalg.norm(rhs)
    if denom == 0:
        return float(np.linalg.norm(lhs))
    return float(np.linalg.norm(lhs - rhs) / denom)


@dataclass
class NormSeries:
    """Append-only record of the monitored norms at observation times."""

    times: list = dc_field(default_factory=list)
    mass: list = dc_field(default_factory=list)
    grad: list = dc_field(default_factory=list)
    jnorm: list = dc_field(default_factory=list)
    sup: list = dc_field(default_factory=list)
    delta: float = 0.01

    def __len__(self):
        return len(self.times)

    def arrays(self) -> dict:
        return {k: np.asarray(getattr(self, k), dtype=float)
                for k in ("times", "mass", "grad", "jnorm", "sup")}

    def running_norms(self):
        """Running X and S norms after each record (lattice maxima)."""
        a = self.arrays()
        w = japanese(a["times"])
        x = a["mass"] + w ** (-self.delta) * (a["jnorm"] + a["grad"])
        s = np.sqrt(w) * a["sup"]
        return np.maximum.accumulate(x), np.maximum.accumulate(s)


def record_norms(f: Field, series: NormSeries, dmap) -> NormSeries:
    """Append ``||u||_2``, ``||u_x||_2``, ``||J(t) u||_2`` and ``||u||_inf`` at ``f.time``."""
    if series.times and not f.time > series.times[-1]:
        raise ValueError(f"time {f.time} does not follow {series.times[-1]}")
    du = derivative(f).values
    ju = f.grid.x * f.values + 2j * dmap.total(f.time) * du
    sq = np.sqrt(f.grid.dx)
    series.times.append(f.time)
    series.mass.append(l2_norm(f))
    series.grad.append(float(sq * np.linalg.norm(du)))
    series.jnorm.append(float(sq * np.linalg.norm(ju)))
    series.sup.append(float(np.max(np.abs(f.values))))
    return series


def bootstrap_norms(series: NormSeries) -> tuple[float, float]:
    """Lattice maxima of the X and S norms over the whole series."""
    if not len(series):
        raise ValueError("empty norm series")
    x, s = series.running_norms()
    return float(x[-1]), float(s[-1])
