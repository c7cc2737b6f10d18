"""Simulation and verification tools for the cubic dispersion-managed NLS."""

from .dispersion import (ConstantDispersion, DispersionMap, average_dispersion,
                         eval_gamma, threshold_T0, total_dispersion)
from .spectral import (Field, Grid, forward_ft, free_propagate, inverse_ft,
                       mdfm_factorization, project_band_derivative, project_low)
from .solver import (StepControl, SolverAbort, evolve, evolve_gt, evolve_standard,
                     gt_nonlinearity, nonlinear_phase_step, step_strang)
from .analysis import (NormSeries, apply_vector_field, bootstrap_norms, chain_rule_residual,
                       commutation_residual, record_norms, sigma_norm)
from .scattering import (GaugeState, ScatteringProfile, ScatteringTracker, accumulate_gauge,
                         asymptotic_field, compute_psi, cut_low, extract_profile, gauge,
                         residual, to_profile_w, w_residual)

__version__ = "0.1.0"
