"""On-disk formats: norms CSV, profile JSON and binary field snapshots.

Field snapshot layout (little-endian)::

    bytes 0-7    magic b"DMNLS1\\0\\0"
    bytes 8-15   N      int64
    bytes 16-23  L      float64   (grid half-width)
    bytes 24-31  t      float64
    then N (re, im) float64 pairs
"""

from __future__ import annotations

import csv
import json
import struct
from pathlib import Path

import numpy as np

from ..analysis import NormSeries
from ..scattering import ScatteringProfile
from ..spectral import Field, Grid

NORM_COLUMNS = ("t", "mass", "grad_l2", "j_l2", "sup", "x_norm_partial", "s_norm_partial")
PROFILE_KEYS = ("xi", "W0_re", "W0_im", "Phi", "W_re", "W_im", "meta")
MAGIC = b"DMNLS1\x00\x00"
_HEADER = struct.Struct("<8sqdd")


def write_norms_csv(path, series: NormSeries) -> None:
    a = series.arrays()
    xs, ss = series.running_norms() if len(series) else (np.empty(0), np.empty(0))
    rows = zip(a["times"], a["mass"], a["grad"], a["jnorm"], a["sup"], xs, ss)
    with open(path, "w", newline="") as fh:
        fh.write(",".join(NORM_COLUMNS) + "\n")
        for row in rows:
            fh.write(",".join("%.17g" % v for v in row) + "\n")


def read_norms_csv(path, delta: float = 0.01) -> NormSeries:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != NORM_COLUMNS:
            raise ValueError(f"unexpected norms.csv header {reader.fieldnames}")
        rows = list(reader)
    s = NormSeries(delta=delta)
    for r in rows:
        s.times.append(float(r["t"]))
        s.mass.append(float(r["mass"]))
        s.grad.append(float(r["grad_l2"]))
        s.jnorm.append(float(r["j_l2"]))
        s.sup.append(float(r["sup"]))
    return s


def write_json(path, obj) -> None:
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=1, allow_nan=False)
        fh.write("\n")


def write_profile_json(path, profile: ScatteringProfile, meta: dict | None = None) -> None:
    write_json(path, profile.to_dict(meta))


def read_profile_json(path) -> ScatteringProfile:
    with open(path) as fh:
        data = json.load(fh)
    validate_profile_dict(data)
    return ScatteringProfile.from_dict(data)


def validate_profile_dict(data: dict) -> None:
    if tuple(data) != PROFILE_KEYS:
        raise ValueError(f"profile keys {tuple(data)} do not match {PROFILE_KEYS}")
    n = len(data["xi"])
    for key in PROFILE_KEYS[1:-1]:
        if len(data[key]) != n or not all(isinstance(v, (int, float)) for v in data[key]):
            raise ValueError(f"profile entry {key!r} must hold {n} reals")
    if not isinstance(data["meta"], dict):
        raise ValueError("profile meta must be an object")


def write_field(path, f: Field) -> None:
    g = f.grid
    body = np.empty(2 * g.size, dtype="<f8")
    body[0::2] = f.values.real
    body[1::2] = f.values.imag
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, g.size, g.half_width, f.time))
        fh.write(body.tobytes())


def read_field(path) -> Field:
    raw = Path(path).read_bytes()
    magic, n, L, t = _HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise ValueError(f"{path}: not a DMNLS1 snapshot")
    body = np.frombuffer(raw, dtype="<f8", offset=_HEADER.size)
    if body.size != 2 * n:
        raise ValueError(f"{path}: expected {n} samples, found {body.size // 2}")
    return Field(Grid(L, n), body[0::2] + 1j * body[1::2], t)


def write_history(path, tracker) -> None:
    """Gauge histories (times, g, Psi) so profiles can be re-extracted later."""
    with open(path, "wb") as fh:
        np.savez(fh, times=np.asarray(tracker.times), g=np.asarray(tracker.g),
                 psi=np.asarray(tracker.psi), outside_mass=np.asarray(tracker.outside_mass),
                 anchor=tracker.anchor, xi_max=tracker.xi_grid.half_width)
