"""Run configuration: a flat TOML file of ``key = value`` pairs.

Every key is optional and defaults to the desk-scale configuration below;
unknown keys are rejected.  Example::

    gamma_plus = 2.0
    gamma_minus = 1.0
    family = "gaussian"
    epsilon = 0.1
    t_max = 400.0
    output_dir = "runs/eps0.1"
"""

from __future__ import annotations

import dataclasses
import math
import sys
from dataclasses import dataclass, fields

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from ..dispersion import ConstantDispersion, DispersionMap
from ..spectral import Grid

FAMILIES = ("gaussian", "chirped_gaussian", "double_bump", "random_bumps")
SOLVERS = ("dmnls", "standard", "gt")


@dataclass(frozen=True)
class RunConfig:
    # dispersion map; "constant" replaces gamma by its average
    gamma_plus: float = 2.0
    gamma_minus: float = 1.0
    dispersion: str = "managed"
    # initial data, rescaled so that its Sigma norm equals epsilon
    family: str = "gaussian"
    epsilon: float = 0.1
    chirp: float = 0.5
    separation: float = 4.0
    seed: int = 0
    # grid and time stepping
    half_width: float = 2048.0
    size: int = 8192
    dt: float = 0.005
    t_max: float = 400.0
    obs_interval: float = 0.5
    dealias: bool = False
    nonlinear_coeff: float = 1.0
    monitor_threshold: float = 1e-8
    # analysis
    delta: float = 0.01
    window_start: float = 200.0
    window_end: float = 400.0
    fit_t_min: float = 50.0
    xi_max: float = 4.5
    xi_points: int = 512
    solver: str = "dmnls"
    gt_nodes: int = 8
    # output
    output_dir: str = "runs/default"
    snapshots: bool = True

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown initial-data family {self.family!r}; choose from {FAMILIES}")
        if self.solver not in SOLVERS:
            raise ValueError(f"unknown solver {self.solver!r}; choose from {SOLVERS}")
        if self.dispersion not in ("managed", "constant"):
            raise ValueError("dispersion must be 'managed' or 'constant'")
        if self.dispersion == "constant" and self.solver == "dmnls":
            raise ValueError("the dmnls solver needs a managed dispersion map")
        if not self.epsilon >= 0:
            raise ValueError("epsilon must be nonnegative")
        if not 0 < self.dt <= 0.25:
            raise ValueError("dt must lie in (0, 1/4]")
        n = self.size
        if n < 16 or n & (n - 1):
            raise ValueError("size must be a power of two >= 16")
        if not self.t_max > self.dispersion_map.T0:
            raise ValueError(f"t_max must exceed T0 = {self.dispersion_map.T0}")
        if self.gt_nodes < 2 or self.gt_nodes % 2:
            raise ValueError("gt_nodes must be an even integer >= 2")

    @property
    def dispersion_map(self) -> DispersionMap:
        return DispersionMap(self.gamma_plus, self.gamma_minus)

    @property
    def linear_dispersion(self):
        """Dispersion driving the free part for the configured solver."""
        dm = self.dispersion_map
        if self.solver == "dmnls":
            return dm
        return ConstantDispersion(dm.average)

    @property
    def gt_map(self):
        dm = self.dispersion_map
        return ConstantDispersion(dm.average) if self.dispersion == "constant" else dm

    @property
    def grid(self) -> Grid:
        return Grid(self.half_width, self.size)

    @property
    def window(self) -> tuple[float, float]:
        return (self.window_start, self.window_end)

    def replace(self, **changes) -> "RunConfig":
        return dataclasses.replace(self, **{k: v for k, v in changes.items() if v is not None})

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


def config_from_dict(data: dict) -> RunConfig:
    known = {f.name: f for f in fields(RunConfig)}
    unknown = sorted(set(data) - set(known))
    if unknown:
        raise ValueError(f"unknown config keys: {', '.join(unknown)}")
    out = {}
    for key, value in data.items():
        typ = known[key].type
        if typ == "float":
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise ValueError(f"{key} must be a number")
            value = float(value)
            if not math.isfinite(value):
                raise ValueError(f"{key} must be finite")
        elif typ == "int":
            if isinstance(value, bool) or not isinstance(value, int):
                raise ValueError(f"{key} must be an integer")
        elif typ == "bool":
            if not isinstance(value, bool):
                raise ValueError(f"{key} must be true or false")
        elif typ == "str" and not isinstance(value, str):
            raise ValueError(f"{key} must be a string")
        out[key] = value
    return RunConfig(**out)


def load_config(path) -> RunConfig:
    with open(path, "rb") as fh:
        data = tomllib.load(fh)
    nested = [k for k, v in data.items() if isinstance(v, dict)]
    if nested:
        raise ValueError(f"config must be flat; found tables {nested}")
    return config_from_dict(data)
