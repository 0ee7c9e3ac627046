"""Local self-correction of one codeword symbol from sigma line queries.

The decoder draws sigma distinct lines through the target point, turns
the q-1 answers on each line into claimed derivative data of the
restricted univariate polynomial, decodes every line, and solves a small
linear system for the Hasse derivatives at the target point itself.
"""

from __future__ import annotations

from dataclasses import dataclass

from .gflinalg import InconsistentSystemError, SingularSystemError, solve
from .mpoly import direction_power, multi_indices_of_weight
from .multcode import (
    CodeParams,
    EvalTuple,
    Point,
    index_point,
    point_index,
    sample_directions,
    sample_transversal_directions,
)
from .unidecode import LineDecodingError, LineWord, decode_line

MAX_DIRECTION_RETRIES = 32


@dataclass
class LineQuerySet:
    """sigma lines through one base point, minus the base point itself."""

    base_point: Point
    directions: list[Point]
    query_points: list[list[Point]]  # per line: positions alpha_1..alpha_{q-1}


def line_points(params: CodeParams, base: Point, direction: Point) -> list[Point]:
    """The q-1 points base + alpha*direction for nonzero alpha."""
    fld = params.field
    out = []
    for b in range(1, params.q):
        out.append(tuple(fld.add(x, fld.mul(b, u)) for x, u in zip(base, direction)))
    return out


def plan_lines(
    params: CodeParams, point: Point, rng, transversal_only: bool = False
) -> LineQuerySet:
    """Pick sigma distinct random lines through the target point.

    With transversal_only, directions are restricted to lines meeting
    every hyperplane exactly once, as the distributed protocol requires.
    """
    if transversal_only:
        directions = sample_transversal_directions(params, rng, params.sigma)
    else:
        directions = sample_directions(params, rng, params.sigma)
    return LineQuerySet(
        base_point=point,
        directions=directions,
        query_points=[line_points(params, point, u) for u in directions],
    )


def side_values(params: CodeParams, direction: Point, answers: list[EvalTuple]) -> LineWord:
    """Project per-point derivative tuples onto one line's derivative data.

    Position b of the result is sum over |v| = e of answer_b[v] * U^v,
    the claimed e-th Hasse derivative of the restriction at alpha_b; a
    corrupted answer therefore corrupts only its own position.
    """
    if len(answers) != params.q - 1:
        raise ValueError(f"need q-1 = {params.q - 1} answers")
    fld = params.field
    weights = [fld.check_element(direction_power(fld, direction, v)) for v in params.derivs]
    grouped: list[list[int]] = [[] for _ in range(params.s)]
    for idx, v in enumerate(params.derivs):
        grouped[sum(v)].append(idx)
    values = []
    for ans in answers:
        if len(ans) != params.sigma:
            raise ValueError("answers must be sigma-tuples")
        row = []
        for e in range(params.s):
            acc = 0
            for idx in grouped[e]:
                acc = fld.add(acc, fld.mul(ans[idx], weights[idx]))
            row.append(acc)
        values.append(tuple(row))
    return LineWord(fld, params.s, values)


def recover_symbol(
    params: CodeParams,
    point: Point,
    directions: list[Point],
    line_answers: list[list[EvalTuple]],
) -> EvalTuple:
    """Rebuild the derivative tuple at the target from decoded lines.

    For each order e the decoded line coefficients give one equation per
    line in the unknown derivatives of that order; the blocks are solved
    independently and every equation is checked, so disagreement between
    lines surfaces as InconsistentSystemError instead of a wrong value.
    """
    fld = params.field
    if len(directions) != params.sigma or len(line_answers) != params.sigma:
        raise ValueError("need one answer list per line")
    line_polys = []
    for direction, answers in zip(directions, line_answers):
        word = side_values(params, direction, answers)
        line_polys.append(decode_line(word, params.d))

    out: dict[tuple[int, ...], int] = {}
    for e in range(params.s):
        vs = multi_indices_of_weight(params.m, e)
        rows = [[direction_power(fld, u, v) for v in vs] for u in directions]
        rhs = [cs[e] if e < len(cs) else 0 for cs in line_polys]
        values = solve(fld, rows, rhs)
        out.update(zip(vs, values))
    return tuple(out[v] for v in params.derivs)


def local_decode(
    params: CodeParams,
    oracle,
    j: int,
    rng,
    transversal_only: bool = False,
    max_retries: int = MAX_DIRECTION_RETRIES,
) -> EvalTuple:
    """Recover symbol j by querying ``oracle(point)`` along random lines.

    Redraws the lines when a draw produces a rank-deficient system
    (possible for small q) or when corrupted positions line up badly
    enough to leave a line ambiguous or undecodable; the last error is
    re-raised once the retry budget runs out.
    """
    point = index_point(params, j)
    last: ValueError | None = None
    for _ in range(max_retries):
        plan = plan_lines(params, point, rng, transversal_only=transversal_only)
        answers = [[oracle(pt) for pt in pts] for pts in plan.query_points]
        try:
            return recover_symbol(params, point, plan.directions, answers)
        except (SingularSystemError, InconsistentSystemError, LineDecodingError) as err:
            last = err
    raise last


def oracle_from_codeword(params: CodeParams, symbols: list[EvalTuple]):
    """Query-access view of a stored codeword, for local decoding tests."""

    def oracle(point: Point) -> EvalTuple:
        return symbols[point_index(params, point)]

    return oracle


__all__ = [
    "LineQuerySet",
    "LineDecodingError",
    "InconsistentSystemError",
    "SingularSystemError",
    "plan_lines",
    "line_points",
    "side_values",
    "recover_symbol",
    "local_decode",
    "oracle_from_codeword",
]
