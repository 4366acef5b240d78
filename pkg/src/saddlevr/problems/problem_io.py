from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import TYPE_CHECKING, Any

import numpy as np

from saddlevr.errors import StructuralError
from saddlevr.sparsela import build_matrix, read_matrix_market, write_matrix_market

from .bilinear_problem import BilinearProblem
from .lp_problem import StandardLpProblem
from .problem_kind import ProblemKind

if TYPE_CHECKING:
    from saddlevr.base import BaseProblem

logger = logging.getLogger(__name__)


def problem_to_dict(problem: BaseProblem, matrix_ref: str | None = None) -> dict[str, Any]:
    """
    JSON-ready description of a problem.

    Args:
        problem: The problem.
        matrix_ref: Path of a Matrix Market file to reference instead of inline
            triplets.
    """
    data: dict[str, Any] = {
        "kind": problem.kind.value,
        "m": problem.m,
        "n": problem.n,
        "matrix": matrix_ref if matrix_ref is not None else [list(t) for t in problem.matrix.triplets()],
        "b": problem.b.tolist(),
        "c": problem.c.tolist(),
    }
    if isinstance(problem, StandardLpProblem):
        if problem.known_optimum is not None:
            x, y = problem.split(np.asarray(problem.known_optimum))
            data["known_optimum"] = {"x": x.tolist(), "y": y.tolist()}
        if problem.dual_nonneg:
            data["dual_nonneg_flag"] = True
        if problem.hoffman_constant is not None:
            data["hoffman_constant"] = problem.hoffman_constant
    return data


def problem_from_dict(data: dict[str, Any], base_dir: str | Path = ".") -> BaseProblem:
    """
    Rebuilds a problem from its JSON description.

    Raises:
        StructuralError: On an unknown kind, a missing or malformed field, or
            inconsistent dimensions.
    """
    if not isinstance(data, dict):
        msg = f"A problem description is a JSON object, got {type(data).__name__}."
        raise StructuralError(msg)
    try:
        kind = ProblemKind(data["kind"])
    except (KeyError, ValueError) as e:
        msg = f"Unknown or missing problem kind: {data.get('kind')!r}"
        raise StructuralError(msg) from e

    try:
        return _build_problem(kind, data, Path(base_dir))
    except StructuralError:
        raise
    except (KeyError, TypeError, ValueError) as e:
        msg = f"Malformed problem description: missing or invalid field {e}"
        raise StructuralError(msg) from e


def _build_problem(kind: ProblemKind, data: dict[str, Any], base_dir: Path) -> BaseProblem:
    shape = (int(data["m"]), int(data["n"]))
    source = data["matrix"]
    if isinstance(source, str):
        matrix = read_matrix_market(base_dir / source)
        if matrix.shape != shape:
            msg = f"Matrix file {source} has shape {matrix.shape}, expected {shape}."
            raise StructuralError(msg)
    else:
        matrix = build_matrix([(int(i), int(j), float(v)) for i, j, v in source], shape=shape)

    if kind is ProblemKind.BILINEAR:
        return BilinearProblem(matrix, data["b"], data["c"])

    optimum = data.get("known_optimum")
    known = None if optimum is None else np.concatenate([optimum["x"], optimum["y"]]).astype(np.float64)
    return StandardLpProblem(
        matrix,
        data["b"],
        data["c"],
        known_optimum=known,
        hoffman_constant=data.get("hoffman_constant"),
        dual_nonneg=bool(data.get("dual_nonneg_flag", False)),
    )


def save_problem(
    problem: BaseProblem,
    path: str | Path,
    *,
    inline: bool = False,
    extra: dict[str, Any] | None = None,
) -> Path:
    """
    Writes ``<path>`` as JSON and, unless ``inline``, ``<stem>.mtx`` next to it.

    Args:
        problem: The problem to store.
        path: Target JSON path.
        inline: Embed triplets instead of writing a Matrix Market file.
        extra: Additional top-level fields, e.g. the generator parameters.

    Returns:
        The JSON path.
    """
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    matrix_ref = None
    if not inline:
        mtx = target.with_suffix(".mtx")
        write_matrix_market(mtx, problem.matrix, comment=f"saddlevr {problem.kind.value} instance")
        matrix_ref = mtx.name

    data = problem_to_dict(problem, matrix_ref=matrix_ref)
    if extra:
        data.update(extra)
    target.write_text(json.dumps(data, indent=2) + "\n", encoding="utf-8")
    logger.info("Wrote problem file %s", target)
    return target


def load_problem(path: str | Path) -> BaseProblem:
    source = Path(path)
    data = json.loads(source.read_text(encoding="utf-8"))
    return problem_from_dict(data, base_dir=source.parent)
