__all__ = [
    "BoundednessCheck",
    "DescentCheck",
    "GapBoundCheck",
    "GapQuery",
    "GapSolution",
    "RateFit",
    "TrialEnsemble",
    "TrialOutcome",
    "boundedness_probe",
    "derive_seed",
    "descent_probe",
    "fit_linear_rate",
    "gap_bound_probe",
    "normalized_duality_gap",
    "random_descent_checks",
    "run_trials",
    "run_trials_async",
    "sampled_duality_gap",
    "solve_gap",
    "subdifferential_distance",
]

from .probes import (
    BoundednessCheck,
    DescentCheck,
    GapBoundCheck,
    boundedness_probe,
    descent_probe,
    gap_bound_probe,
    random_descent_checks,
)
from .rate_fit import RateFit, fit_linear_rate
from .sharpness import (
    GapQuery,
    GapSolution,
    normalized_duality_gap,
    sampled_duality_gap,
    solve_gap,
    subdifferential_distance,
)
from .trials import TrialEnsemble, TrialOutcome, derive_seed, run_trials, run_trials_async
