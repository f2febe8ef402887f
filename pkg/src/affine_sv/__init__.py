"""Analysis of affine stochastic volatility models via generalized Riccati equations."""
from .affine_core import (
    AdmissibleParameterSet,
    CallableGenerator,
    GeneratorPair,
    ParametricGenerator,
    chi,
    eval_F,
    eval_R,
    generator_from_parameters,
    validate_admissibility,
)
from .explosion import critical_moments, cutoff_time, explosion_time, explosion_time_stationary, lee_slopes, varsigma
from .kernels import BACKEND
from .longterm import (
    compute_h,
    compute_interval_I,
    compute_J,
    conservativeness_check,
    convergence_bounds,
    l_plus,
    martingale_check,
    solve_w,
    stationary_cgf,
)
from .models import preset
from .pricing import call_price, implied_variance, stationary_call_price
from .riccati import SolverConfig, cgf, solve_riccati

__version__ = "0.1.0"

__all__ = [
    "AdmissibleParameterSet", "CallableGenerator", "GeneratorPair", "ParametricGenerator", "chi", "eval_F",
    "eval_R", "generator_from_parameters", "validate_admissibility", "critical_moments", "cutoff_time",
    "explosion_time", "explosion_time_stationary", "lee_slopes", "varsigma", "BACKEND", "compute_h",
    "compute_interval_I", "compute_J", "conservativeness_check", "convergence_bounds", "l_plus",
    "martingale_check", "solve_w", "stationary_cgf", "preset", "call_price", "implied_variance",
    "stationary_call_price", "SolverConfig", "cgf", "solve_riccati",
]
