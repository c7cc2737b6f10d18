"""Configuration, orchestration, persistence and the command line."""

from .config import RunConfig, config_from_dict, load_config
from .experiments import (RunResult, compare_solvers, initial_data, run_simulation,
                          smooth_corpus, verify_identities)
from .fitting import PowerLawFit, fit_log_phase, fit_power_law

__all__ = [
    "RunConfig", "config_from_dict", "load_config", "RunResult", "compare_solvers",
    "initial_data", "run_simulation", "smooth_corpus", "verify_identities",
    "PowerLawFit", "fit_log_phase", "fit_power_law",
]
