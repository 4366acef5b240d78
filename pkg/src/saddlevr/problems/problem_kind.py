from enum import Enum


class ProblemKind(str, Enum):
    """Selects the prox rule and the optimality conditions of a problem."""

    BILINEAR = "bilinear"
    LP = "lp"
