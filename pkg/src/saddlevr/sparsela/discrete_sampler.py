from __future__ import annotations

from dataclasses import dataclass, field
from typing import TYPE_CHECKING

import numpy as np

from saddlevr.errors import InvalidDistributionError

if TYPE_CHECKING:
    import numpy.typing as npt


@dataclass(frozen=True)
class DiscreteSampler:
    """Walker/Vose alias table over the strictly positive part of a weight vector.

    Zero-weight items are left out of the table; ``support`` maps table slots back
    to the caller's indices. One uniform variate is consumed per draw.
    """

    support: npt.NDArray[np.int64] = field(repr=False)
    probabilities: npt.NDArray[np.float64] = field(repr=False)
    accept: npt.NDArray[np.float64] = field(repr=False)
    alias: npt.NDArray[np.int64] = field(repr=False)

    @property
    def support_size(self) -> int:
        return int(self.support.size)

    def draw(self, rng: np.random.Generator) -> int:
        """Draws one original index."""
        scaled = rng.random() * self.support.size
        slot = int(scaled)
        if scaled - slot >= self.accept[slot]:
            slot = int(self.alias[slot])
        return int(self.support[slot])

    def draw_many(self, rng: np.random.Generator, size: int) -> npt.NDArray[np.int64]:
        """Vectorized draws; uses the same one-uniform-per-draw scheme as ``draw``."""
        scaled = rng.random(size) * self.support.size
        slots = scaled.astype(np.int64)
        rejected = (scaled - slots) >= self.accept[slots]
        slots[rejected] = self.alias[slots[rejected]]
        return self.support[slots]

    def table_probabilities(self) -> npt.NDArray[np.float64]:
        """Exact distribution encoded by the alias table, indexed like ``support``."""
        n = self.support.size
        mass = self.accept / n
        np.add.at(mass, self.alias, (1.0 - self.accept) / n)
        return mass

    def probability_of(self, index: int) -> float:
        pos = np.searchsorted(self.support, index)
        if pos < self.support.size and self.support[pos] == index:
            return float(self.probabilities[pos])
        return 0.0


def build_sampler(weights: npt.ArrayLike) -> DiscreteSampler:
    """
    Builds an alias sampler with P(draw = k) = weights[k] / sum(weights).

    Args:
        weights: Nonnegative weights.

    Returns:
        The sampler.

    Raises:
        InvalidDistributionError: If no weight is strictly positive, or a weight is
            negative or not finite.
    """
    w = np.asarray(weights, dtype=np.float64).ravel()
    if w.size and (not np.all(np.isfinite(w)) or w.min() < 0):
        msg = "Sampling weights must be finite and nonnegative."
        raise InvalidDistributionError(msg)

    support = np.flatnonzero(w > 0).astype(np.int64)
    if support.size == 0:
        msg = "Bad weights: total probability is zero."
        raise InvalidDistributionError(msg)

    positive = w[support]
    probabilities = positive / positive.sum()
    accept, alias = _vose_table(probabilities)
    return DiscreteSampler(support=support, probabilities=probabilities, accept=accept, alias=alias)


def _vose_table(probabilities: npt.NDArray[np.float64]) -> tuple[npt.NDArray[np.float64], npt.NDArray[np.int64]]:
    n = probabilities.size
    scaled = probabilities * n
    accept = np.ones(n, dtype=np.float64)
    alias = np.arange(n, dtype=np.int64)

    small = [i for i in range(n) if scaled[i] < 1.0]
    large = [i for i in range(n) if scaled[i] >= 1.0]
    while small and large:
        less = small.pop()
        more = large.pop()
        accept[less] = scaled[less]
        alias[less] = more
        scaled[more] = (scaled[more] + scaled[less]) - 1.0
        if scaled[more] < 1.0:
            small.append(more)
        else:
            large.append(more)

    # leftovers are 1 up to rounding
    for i in small + large:
        accept[i] = 1.0
        alias[i] = i
    return accept, alias
