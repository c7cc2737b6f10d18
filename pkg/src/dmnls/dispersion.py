"""Piecewise-constant dispersion maps and their exact total dispersion.

The map is the 1-periodic extension of ``gamma_plus`` on ``[0, 1/2)`` and
``-gamma_minus`` on ``[1/2, 1)``.  Every quantity here is computed in closed
form, so it stays exact (to rounding) for times of order ``1e4``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "DispersionMap",
    "ConstantDispersion",
    "eval_gamma",
    "total_dispersion",
    "average_dispersion",
    "threshold_T0",
]


def _split(t):
    # whole periods and fractional part; both exact in floating point
    n = np.floor(t)
    return n, t - n


@dataclass(frozen=True)
class DispersionMap:
    """Two-piece, 1-periodic dispersion map with positive average.

    Parameters
    ----------
    gamma_plus : float
        Dispersion on ``[0, 1/2)``.
    gamma_minus : float
        Magnitude of the (negative) dispersion on ``[1/2, 1)``.
    """

    gamma_plus: float
    gamma_minus: float

    period = 1.0

    def __post_init__(self):
        gp, gm = float(self.gamma_plus), float(self.gamma_minus)
        if not (np.isfinite(gp) and np.isfinite(gm)):
            raise ValueError("dispersion values must be finite")
        if gp <= 0 or gm <= 0:
            raise ValueError("gamma_plus and gamma_minus must be positive")
        if gp - gm <= 0:
            raise ValueError(
                f"average dispersion must be positive, got gamma_plus={gp}, gamma_minus={gm}"
            )
        object.__setattr__(self, "gamma_plus", gp)
        object.__setattr__(self, "gamma_minus", gm)

    @property
    def average(self) -> float:
        return 0.5 * (self.gamma_plus - self.gamma_minus)

    @property
    def sup_norm(self) -> float:
        return max(self.gamma_plus, self.gamma_minus)

    @property
    def T0(self) -> float:
        return 4.0 * self.sup_norm / self.average

    def breakpoints(self, t_start: float, t_end: float) -> np.ndarray:
        """Discontinuities of the map strictly inside ``(t_start, t_end)``."""
        k0 = np.floor(2.0 * t_start) + 1
        k1 = np.ceil(2.0 * t_end) - 1
        if k1 < k0:
            return np.empty(0)
        pts = np.arange(k0, k1 + 1) / 2.0
        return pts[(pts > t_start) & (pts < t_end)]

    def __call__(self, t):
        _, f = _split(np.asarray(t, dtype=float))
        out = np.where(f < 0.5, self.gamma_plus, -self.gamma_minus)
        return out if out.ndim else float(out)

    def _partial(self, f):
        # integral of gamma over [0, f] for f in [0, 1)
        gp, gm = self.gamma_plus, self.gamma_minus
        return np.where(f < 0.5, gp * f, 0.5 * gp - gm * (f - 0.5))

    def total(self, t, t0=0.0):
        """Exact integral of the map from ``t0`` to ``t``."""
        n, f = _split(np.asarray(t, dtype=float))
        n0, f0 = _split(np.asarray(t0, dtype=float))
        # integer period count is exact; only one rounding on the product
        out = (n - n0) * self.average + (self._partial(f) - self._partial(f0))
        return out if out.ndim else float(out)


@dataclass(frozen=True)
class ConstantDispersion:
    """Time-independent dispersion ``gamma(t) = value``.

    Used for the averaged comparison equations; it exposes the same
    calculus as :class:`DispersionMap` so the solvers can share code.
    """

    value: float

    def __post_init__(self):
        if not np.isfinite(self.value) or self.value <= 0:
            raise ValueError("constant dispersion must be positive and finite")
        object.__setattr__(self, "value", float(self.value))

    @property
    def average(self) -> float:
        return self.value

    @property
    def sup_norm(self) -> float:
        return self.value

    @property
    def T0(self) -> float:
        return 4.0

    def breakpoints(self, t_start: float, t_end: float) -> np.ndarray:
        return np.empty(0)

    def __call__(self, t):
        out = np.full(np.shape(t), self.value)
        return out if out.ndim else float(out)

    def total(self, t, t0=0.0):
        out = self.value * (np.asarray(t, dtype=float) - np.asarray(t0, dtype=float))
        return out if out.ndim else float(out)


def eval_gamma(dmap, t):
    """Value of the dispersion map at time(s) ``t`` (right-continuous)."""
    return dmap(t)


def total_dispersion(dmap, t, t0=0.0):
    """Total dispersion accumulated from ``t0`` to ``t`` (antisymmetric)."""
    return dmap.total(t, t0)


def average_dispersion(dmap) -> float:
    return dmap.average


def threshold_T0(dmap) -> float:
    """Time past which the total dispersion exceeds half of ``average * t``."""
    return dmap.T0
