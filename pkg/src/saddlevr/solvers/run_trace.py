from __future__ import annotations

import json
import logging
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import TYPE_CHECKING, Any

import numpy as np

from saddlevr.errors import InfeasibleError, UnsupportedProblemError

if TYPE_CHECKING:
    from collections.abc import Iterator

    import numpy.typing as npt

    from saddlevr.base import BaseProblem

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TraceRecord:
    """One checkpoint of a run.

    ``restart`` marks epoch boundaries, where the point measured is the epoch's
    averaged output; inner checkpoints measure the last iterate.
    """

    step: int
    epoch: int
    oracle_calls: int
    work_units: int
    distance: float | None
    gap: float | None
    elapsed: float
    restart: bool

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)


@dataclass
class RunTrace:
    """Checkpoints of one solver run plus its running cost counters."""

    algorithm: str
    seed: int
    config: dict[str, Any]
    records: list[TraceRecord] = field(default_factory=list)
    final: npt.NDArray[np.float64] | None = field(default=None, repr=False)
    oracle_calls: int = 0
    work_units: int = 0
    _started: float = field(default_factory=time.perf_counter, repr=False)

    def charge(self, calls: int, work: int) -> None:
        self.oracle_calls += calls
        self.work_units += work

    def checkpoint(
        self,
        problem: BaseProblem,
        z: npt.NDArray[np.float64],
        *,
        step: int,
        epoch: int,
        restart: bool,
        gap_radius: float | None = None,
    ) -> TraceRecord:
        """Measures ``z`` and appends a record."""
        record = TraceRecord(
            step=step,
            epoch=epoch,
            oracle_calls=self.oracle_calls,
            work_units=self.work_units,
            distance=_distance_or_none(problem, z),
            gap=None if gap_radius is None else _gap(problem, z, gap_radius),
            elapsed=time.perf_counter() - self._started,
            restart=restart,
        )
        self.records.append(record)
        if restart:
            logger.info(
                "epoch %d step %d: distance=%s calls=%d",
                epoch,
                step,
                "n/a" if record.distance is None else f"{record.distance:.6e}",
                self.oracle_calls,
            )
        return record

    def restart_distances(self) -> list[tuple[int, float]]:
        """(epoch, distance) at every epoch boundary where a distance was measured."""
        return [(r.epoch, r.distance) for r in self.records if r.restart and r.distance is not None]

    @property
    def final_distance(self) -> float | None:
        for record in reversed(self.records):
            if record.distance is not None:
                return record.distance
        return None

    @property
    def final_gap(self) -> float | None:
        for record in reversed(self.records):
            if record.gap is not None:
                return record.gap
        return None

    def first_reaching(self, tolerance: float) -> TraceRecord | None:
        """First checkpoint with distance <= ``tolerance``."""
        for record in self.records:
            if record.distance is not None and record.distance <= tolerance:
                return record
        return None

    def jsonl_lines(self) -> Iterator[str]:
        """Config header, one line per record, then the final iterate."""
        yield json.dumps({"type": "config", "algorithm": self.algorithm, "seed": self.seed, "config": self.config})
        for record in self.records:
            yield json.dumps({"type": "record", **record.to_dict()})
        if self.final is not None:
            yield json.dumps({"type": "final", "z": self.final.tolist()})

    def write_jsonl(self, path: str | Path) -> Path:
        target = Path(path)
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text("".join(line + "\n" for line in self.jsonl_lines()), encoding="utf-8")
        logger.info("Wrote trace %s", target)
        return target


def _distance_or_none(problem: BaseProblem, z: npt.NDArray[np.float64]) -> float | None:
    if not problem.has_distance:
        return None
    try:
        return problem.distance_to_optimum(z)
    except (InfeasibleError, UnsupportedProblemError) as e:
        logger.debug("Distance unavailable: %s", e)
        return None


def _gap(problem: BaseProblem, z: npt.NDArray[np.float64], radius: float) -> float:
    from saddlevr.diagnostics.sharpness import normalized_duality_gap

    return normalized_duality_gap(problem, z, radius)
