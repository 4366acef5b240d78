__all__ = ["BaseOracle", "BaseProblem"]

from saddlevr.base.base_oracle import BaseOracle
from saddlevr.base.base_problem import BaseProblem
