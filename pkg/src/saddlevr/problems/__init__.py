__all__ = [
    "BilinearProblem",
    "ProblemKind",
    "StandardLpProblem",
    "counterexample_lp",
    "generate_bilinear",
    "generate_lp_known_solution",
    "load_problem",
    "lp_from_certificate",
    "problem_from_dict",
    "problem_to_dict",
    "save_problem",
]

from .bilinear_problem import BilinearProblem
from .lp_problem import StandardLpProblem
from .problem_generators import (
    counterexample_lp,
    generate_bilinear,
    generate_lp_known_solution,
    lp_from_certificate,
)
from .problem_io import load_problem, problem_from_dict, problem_to_dict, save_problem
from .problem_kind import ProblemKind
