"""The retrieval protocol: query generation, server answering, rebuild.

Each server stores one hyperplane share.  To fetch the symbol at point P
the client draws sigma transversal lines through P; every server other
than the one whose hyperplane contains P receives the sigma intersection
points of those lines with its hyperplane, and the hosting server
receives sigma random points instead, so no single server can tell
whether it hosts the target.  Per-server batches are shuffled; the
client keeps the permutations and the directions as its secret state.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from enum import Enum

from .localdecode import recover_symbol
from .gflinalg import InconsistentSystemError, SingularSystemError
from .unidecode import LineDecodingError
from .multcode import (
    CodeParams,
    EvalTuple,
    Point,
    Share,
    encode,
    hyperplane_of,
    index_point,
    local_index,
    local_point,
    partition,
    sample_transversal_directions,
)
from .mpoly import MultiPoly

MAX_QUERY_RETRIES = 32


class ProtocolError(ValueError):
    """A malformed query or answer, distinct from decoding failures."""


@dataclass
class QueryPlan:
    """One retrieval's queries plus the client-side secret state."""

    params: CodeParams
    target_index: int
    target_point: Point
    hiding_index: int           # hyperplane containing the target
    directions: list[Point]
    batches: list[list[Point]]  # per server, sigma points in its hyperplane
    perms: list[list[int]]      # perms[l][i] = batch slot of line i at server l


def preprocess(params: CodeParams, F: MultiPoly) -> list[Share]:
    """Encode the message polynomial and split it into server shares."""
    return partition(encode(params, F))


def gen_queries(params: CodeParams, j: int, rng: random.Random) -> QueryPlan:
    """Build the per-server query batches for codeword symbol j."""
    fld = params.field
    point = index_point(params, j)
    hiding = hyperplane_of(params, point)
    directions = sample_transversal_directions(params, rng, params.sigma)

    batches: list[list[Point]] = []
    perms: list[list[int]] = []
    for ell in range(params.q):
        if ell == hiding:
            # fake queries: sigma distinct uniform points of the hosting
            # hyperplane, matching the real batches' distribution
            picks = rng.sample(range(params.points_per_share), params.sigma)
            pts = [local_point(params, ell, i) for i in picks]
        else:
            t = fld.sub(ell, point[-1])  # alpha_l - P_m, nonzero
            pts = [
                tuple(fld.add(x, fld.mul(t, u)) for x, u in zip(point, direction))
                for direction in directions
            ]
        perm = list(range(params.sigma))
        rng.shuffle(perm)
        batch = [None] * params.sigma
        for i, slot in enumerate(perm):
            batch[slot] = pts[i]
        batches.append(batch)  # type: ignore[arg-type]
        perms.append(perm)
    return QueryPlan(params, j, point, hiding, directions, batches, perms)


def answer(share: Share, points: list[Point]) -> list[EvalTuple]:
    """Look up the stored tuples for a query batch."""
    params = share.params
    if len(points) != params.sigma:
        raise ProtocolError(f"expected {params.sigma} points, got {len(points)}")
    out = []
    for pt in points:
        if len(pt) != params.m or hyperplane_of(params, pt) != share.index:
            raise ProtocolError(f"point {pt} does not lie in hyperplane {share.index}")
        out.append(share.symbols[local_index(params, pt)])
    return out


class ByzantineMode(Enum):
    """Fault-injection behaviours for a simulated adversarial server."""

    HONEST = "honest"
    GARBAGE = "garbage"
    FIXED = "fixed"
    BITFLIP = "bitflip"


def corrupt_answers(
    params: CodeParams,
    answers: list[EvalTuple],
    mode: ByzantineMode,
    rng: random.Random,
) -> list[EvalTuple]:
    if mode is ByzantineMode.HONEST:
        return answers
    if mode is ByzantineMode.GARBAGE:
        return [
            tuple(rng.randrange(params.q) for _ in range(params.sigma))
            for _ in answers
        ]
    if mode is ByzantineMode.FIXED:
        return [tuple(1 for _ in range(params.sigma)) for _ in answers]
    if mode is ByzantineMode.BITFLIP:
        return [tuple(v ^ 1 if params.field.p == 2 else (v + 1) % params.q for v in a) for a in answers]
    raise ValueError(f"unknown mode {mode}")


def reconstruct(plan: QueryPlan, answers: list[list[EvalTuple]]) -> EvalTuple:
    """Assemble line words from the q answers and recover the symbol.

    The hosting server's (fake-query) answers are discarded; along line i
    position b comes from the server whose hyperplane the line meets at
    parameter alpha_b, so at most one position per line can be corrupted
    by any single wrong server.
    """
    params = plan.params
    if len(answers) != params.q:
        raise ProtocolError(f"expected {params.q} answers, got {len(answers)}")
    fld = params.field
    for a in answers:
        if len(a) != params.sigma or any(len(t) != params.sigma for t in a):
            raise ProtocolError("malformed answer shape")
    per_line: list[list[EvalTuple]] = []
    for i in range(params.sigma):
        row = []
        for b in range(1, params.q):
            ell = fld.add(plan.target_point[-1], b)  # last coord of P + alpha_b*U_i
            row.append(answers[ell][plan.perms[ell][i]])
        per_line.append(row)
    return recover_symbol(params, plan.target_point, plan.directions, per_line)


def retrieve_record(
    params: CodeParams,
    transport,
    j: int,
    rng: random.Random,
    max_retries: int = MAX_QUERY_RETRIES,
):
    """One full private retrieval of codeword symbol j.

    Returns (symbol, traffic report).  Decoding trouble is retried with a
    fresh random query plan: rank-deficient direction draws, but also
    inconsistent or undecodable lines, which adversarial servers can force
    on an unlucky draw (which positions a wrong server corrupts on each
    line depends on the client's direction choice).  Every plan is
    identically distributed whatever the target, so retries leak nothing.
    Transport failures propagate immediately; if the retry budget runs
    out the last decoding error is re-raised, so a caller never sees an
    unverified value.
    """
    last: ValueError | None = None
    for _ in range(max_retries):
        plan = gen_queries(params, j, rng)
        answers, traffic = transport.fanout(plan)
        try:
            return reconstruct(plan, answers), traffic
        except (SingularSystemError, InconsistentSystemError, LineDecodingError) as err:
            last = err
    raise last
