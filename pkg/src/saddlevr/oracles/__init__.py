__all__ = [
    "CoordinateOracle",
    "FullOracle",
    "OracleKind",
    "OracleSample",
    "RowColumnOracle",
    "empirical_lipschitz_check",
    "exhaustive_expectation",
    "exhaustive_second_moment",
    "make_oracle",
    "make_problem_oracle",
]

from .coordinate_oracle import CoordinateOracle
from .full_oracle import FullOracle
from .oracle_checks import empirical_lipschitz_check, exhaustive_expectation, exhaustive_second_moment
from .oracle_factory import make_oracle, make_problem_oracle
from .oracle_kind import OracleKind
from .oracle_sample import OracleSample
from .row_column_oracle import RowColumnOracle
