"""Abductive logic programming with constraints."""

import json

from . import _ciff
from ._ciff import (
    ParseError,
    check_allowed,
    check_answer,
    coloring_program,
    nqueens_program,
    nqueens_query,
    trace,
    webrepair_program,
)

__all__ = [
    "ParseError",
    "check_allowed",
    "check_answer",
    "coloring_program",
    "nqueens_program",
    "nqueens_query",
    "solve",
    "trace",
    "webrepair_program",
]


def solve(program, query="[]", *, max_answers=None, max_steps=200_000, fair=False,
          label=False, show_equalities=False, bounds=(-10_000_000, 10_000_000)):
    """Return {"status", "answers", "steps", "failures"} with answers as dicts."""
    lo, hi = bounds
    result = _ciff.solve(program, query, max_answers or 0, max_steps, fair, label,
                         show_equalities, lo, hi)
    result["answers"] = [json.loads(a) for a in result["answers"]]
    return result
