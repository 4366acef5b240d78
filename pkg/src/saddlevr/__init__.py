__all__ = [
    "Algorithm",
    "BilinearProblem",
    "OracleKind",
    "RunTrace",
    "SolverConfig",
    "StandardLpProblem",
    "configure_logging",
    "load_problem",
    "make_problem_oracle",
    "resolve_config",
    "rsegm_run",
    "run_algorithm",
    "run_trials",
]

from .diagnostics import run_trials
from .logs import configure_logging
from .oracles import OracleKind, make_problem_oracle
from .problems import BilinearProblem, StandardLpProblem, load_problem
from .solvers import Algorithm, RunTrace, SolverConfig, resolve_config, rsegm_run, run_algorithm
