"""Least-squares power-law fits on log-log axes."""

from __future__ import annotations

from typing import NamedTuple

import numpy as np


class PowerLawFit(NamedTuple):
    slope: float
    intercept: float
    r2: float


def fit_power_law(t, y, t_min: float = 0.0, t_max: float = np.inf,
                  min_samples: int = 10) -> PowerLawFit:
    """Fit ``log y = intercept + slope * log t`` over ``t_min <= t <= t_max``.

    Raises ``ValueError`` if fewer than ``min_samples`` points fall in range
    or any selected ``y`` is not positive.
    """
    t = np.asarray(t, dtype=float)
    y = np.asarray(y, dtype=float)
    sel = (t >= t_min) & (t <= t_max)
    if sel.sum() < min_samples:
        raise ValueError(f"need at least {min_samples} samples with t >= {t_min}, got {sel.sum()}")
    t, y = t[sel], y[sel]
    if np.any(y <= 0) or np.any(t <= 0):
        raise ValueError("power-law fit needs positive t and y")
    lx, ly = np.log(t), np.log(y)
    slope, intercept = np.polyfit(lx, ly, 1)
    resid = ly - (intercept + slope * lx)
    ss_tot = np.sum((ly - ly.mean()) ** 2)
    r2 = 1.0 - np.sum(resid**2) / ss_tot if ss_tot > 0 else 1.0
    return PowerLawFit(float(slope), float(intercept), float(r2))


def fit_log_phase(t, phase, total_dispersion) -> tuple[float, float, float]:
    """Fit ``phase = a + b log t + c / Gamma(t)``; returns ``(a, b, c)``.

    The ``1/Gamma`` column absorbs the phase drift the quadratic chirp leaves
    in the profile variable, which decays like ``1/Gamma`` even for linear
    evolution; ``b`` is then the logarithmic growth rate.
    """
    t = np.asarray(t, dtype=float)
    A = np.column_stack([np.ones_like(t), np.log(t), 1.0 / np.asarray(total_dispersion, dtype=float)])
    coef, *_ = np.linalg.lstsq(A, np.asarray(phase, dtype=float), rcond=None)
    return float(coef[0]), float(coef[1]), float(coef[2])
