from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np
from scipy.stats import linregress

from saddlevr.errors import InsufficientDataError

if TYPE_CHECKING:
    from collections.abc import Iterable

MIN_POINTS = 3


@dataclass(frozen=True)
class RateFit:
    """Geometric decay per epoch fitted on a log scale."""

    rate: float
    goodness: float
    points: int


def fit_linear_rate(checkpoints: Iterable[tuple[float, float | None]]) -> RateFit:
    """
    Least-squares fit of log(distance) against epoch.

    Args:
        checkpoints: (epoch, distance) pairs. Non-positive, missing or non-finite
            distances are skipped.

    Returns:
        rate = exp(slope) and goodness = r^2; a flat series has goodness 1.

    Raises:
        InsufficientDataError: If fewer than three usable points remain or all
            epochs coincide.
    """
    usable = [(float(e), float(d)) for e, d in checkpoints if d is not None and math.isfinite(d) and d > 0.0]
    if len(usable) < MIN_POINTS:
        msg = f"Need at least {MIN_POINTS} positive distances to fit a rate; got {len(usable)}."
        raise InsufficientDataError(msg)

    epochs = np.array([e for e, _ in usable])
    logs = np.log([d for _, d in usable])
    if np.ptp(epochs) == 0.0:
        msg = "All checkpoints share one epoch; the rate is undefined."
        raise InsufficientDataError(msg)
    if np.ptp(logs) == 0.0:
        return RateFit(rate=1.0, goodness=1.0, points=len(usable))

    fit = linregress(epochs, logs)
    return RateFit(rate=float(np.exp(fit.slope)), goodness=float(fit.rvalue**2), points=len(usable))
