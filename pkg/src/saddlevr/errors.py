from __future__ import annotations

from typing import TYPE_CHECKING

if TYPE_CHECKING:
    from saddlevr.solvers.run_trace import RunTrace


class SaddleError(Exception):
    """Base class for every error raised by saddlevr."""


class StructuralError(SaddleError, ValueError):
    """Shapes, indices or domains do not fit together."""


class InvalidDistributionError(SaddleError, ValueError):
    """A sampling distribution has no positive mass."""


class UnsupportedSizeError(SaddleError):
    """The requested computation is restricted to desk-scale inputs."""


class UnsupportedProblemError(SaddleError):
    """The operation is not defined for this problem form."""


class InfeasibleError(SaddleError):
    """The optimal set of the problem is empty."""


class GenerationError(SaddleError):
    """An instance generator could not produce a valid instance."""


class InsufficientDataError(SaddleError, ValueError):
    """Not enough usable points to fit a rate."""


class BisectionError(SaddleError):
    """Root finding for the constrained duality gap missed its tolerance."""


class DivergenceError(SaddleError, ArithmeticError):
    """An iterate stopped being finite.

    Attributes:
        step: Global iteration index where the non-finite value appeared.
        trace: Records collected up to the failure, if any.
    """

    def __init__(self, step: int, trace: RunTrace | None = None) -> None:
        super().__init__(f"Non-finite iterate detected at step {step}")
        self.step = step
        self.trace = trace
