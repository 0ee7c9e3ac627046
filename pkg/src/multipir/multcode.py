"""Multiplicity codes: parameters, encoder, and the hyperplane layout.

A codeword symbol at a point P of F_q^m is the tuple of all Hasse
derivatives of order < s of the message polynomial at P (sigma of them,
in graded-lex order of the derivative index).  Points are enumerated with
the last coordinate slowest, so the hyperplane x_m = alpha_l is the l-th
contiguous block of q^{m-1} symbols; those blocks are the server shares.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from fractions import Fraction

from .field import Field
from .gflinalg import solve
from .mpoly import MultiPoly, multi_indices_of_weight

Point = tuple[int, ...]
EvalTuple = tuple[int, ...]


class ParameterError(ValueError):
    pass


def monomial_basis(m: int, d: int) -> list[tuple[int, ...]]:
    """Exponent tuples with |j| <= d in graded-lex order (degree, then lex)."""
    out = []
    for w in range(d + 1):
        out.extend(multi_indices_of_weight(m, w))
    return out


def derivative_indices(m: int, s: int) -> tuple[tuple[int, ...], ...]:
    """Derivative multi-indices |v| < s in graded-lex order.

    This fixed order defines the layout of every EvalTuple, on the wire
    and in share files.
    """
    out = []
    for w in range(s):
        out.extend(multi_indices_of_weight(m, w))
    return tuple(out)


@dataclass(frozen=True)
class CodeParams:
    """Derived constants of one multiplicity code instance."""

    field: Field
    m: int
    s: int
    d: int
    sigma: int
    k: int
    n: int
    rate: Fraction
    distance_bound: Fraction
    nu: int
    derivs: tuple[tuple[int, ...], ...] = dc_field(repr=False)

    @property
    def q(self) -> int:
        return self.field.q

    @property
    def points_per_share(self) -> int:
        return self.q ** (self.m - 1)

    @property
    def line_length(self) -> int:
        return self.q - 1

    @property
    def queries(self) -> int:
        """LDC-locality: codeword positions read per recovery."""
        return (self.q - 1) * self.sigma


def make_params(fld: Field, m: int, s: int, d: int) -> CodeParams:
    """Code-level constants; the degree bound keeps line decoding injective.

    sigma may exceed the q^{m-1} transversal line classes here (the code
    itself is fine); the protocol layer rejects such parameters when it
    actually has to draw sigma distinct transversal lines.
    """
    if m < 1 or s < 1 or d < 0:
        raise ParameterError("need m >= 1, s >= 1, d >= 0")
    q = fld.q
    if d >= s * (q - 1):
        raise ParameterError(
            f"degree {d} too large: lines of length q-1 need d < s(q-1) = {s * (q - 1)}"
        )
    sigma = math.comb(m + s - 1, m)
    k = math.comb(m + d, m)
    n = q ** m
    derivs = derivative_indices(m, s)
    assert len(derivs) == sigma
    rate = Fraction(k, sigma * n)
    distance_bound = Fraction(q ** m) - Fraction(d, s) * q ** (m - 1)
    nu = max(0, (s * (q - 1) - d) // (2 * s))
    return CodeParams(fld, m, s, d, sigma, k, n, rate, distance_bound, nu, derivs)


# -- point enumeration ----------------------------------------------------


def index_point(params: CodeParams, i: int) -> Point:
    """Canonical point for an index; first coordinate varies fastest."""
    if not 0 <= i < params.n:
        raise IndexError(f"point index {i} out of range [0, {params.n})")
    q = params.q
    coords = []
    for _ in range(params.m):
        coords.append(i % q)
        i //= q
    return tuple(coords)


def point_index(params: CodeParams, point: Point) -> int:
    if len(point) != params.m:
        raise ValueError("point has wrong arity")
    q = params.q
    i = 0
    for x in reversed(point):
        params.field.check_element(x)
        i = i * q + x
    return i


def hyperplane_of(params: CodeParams, point: Point) -> int:
    """Index l with point in H_l, i.e. the last coordinate's enumeration."""
    return point[-1]


def local_index(params: CodeParams, point: Point) -> int:
    """Position of a point within its hyperplane block."""
    q = params.q
    i = 0
    for x in reversed(point[:-1]):
        i = i * q + x
    return i


def local_point(params: CodeParams, ell: int, i: int) -> Point:
    """Inverse of local_index for hyperplane l."""
    q = params.q
    coords = []
    for _ in range(params.m - 1):
        coords.append(i % q)
        i //= q
    coords.append(ell)
    return tuple(coords)


# -- encoding --------------------------------------------------------------


@dataclass
class Codeword:
    params: CodeParams
    symbols: list[EvalTuple]


@dataclass
class Share:
    """Restriction of a codeword to one hyperplane; one server's storage."""

    params: CodeParams
    index: int
    symbols: list[EvalTuple]


def _eval_on_grid(fld: Field, m: int, coeffs: dict) -> list[int]:
    """Evaluate a sparse polynomial at every point, canonical order.

    Collapses one variable at a time (last coordinate slowest), which is
    far cheaper than independent per-point evaluation for dense messages.
    """
    if m == 0:
        return [coeffs.get((), 0)]
    out = []
    fadd, fmul, fpow = fld.add, fld.mul, fld.pow
    for a in fld.elements():
        sub: dict = {}
        for exps, c in coeffs.items():
            term = fmul(c, fpow(a, exps[-1]))
            if term == 0:
                continue
            key = exps[:-1]
            prev = sub.get(key)
            sub[key] = term if prev is None else fadd(prev, term)
        out.extend(_eval_on_grid(fld, m - 1, sub))
    return out


def evaluate_with_derivatives(fld: Field, m: int, s: int, F: MultiPoly) -> list[EvalTuple]:
    """All order-< s Hasse derivative tuples of F over the point grid.

    The raw evaluation map of the code, independent of any protocol
    constraints on (m, s).
    """
    columns = []
    for v in derivative_indices(m, s):
        g = F.hasse_derivative(v)
        columns.append(_eval_on_grid(fld, m, g.coeffs))
    return list(zip(*columns))


def encode(params: CodeParams, F: MultiPoly) -> Codeword:
    """Evaluate F and all its order-< s Hasse derivatives at every point."""
    if F.field != params.field or F.m != params.m:
        raise ValueError("polynomial does not match code parameters")
    if F.degree > params.d:
        raise ParameterError(f"deg F = {F.degree} exceeds bound {params.d}")
    return Codeword(params, evaluate_with_derivatives(params.field, params.m, params.s, F))


def partition(cw: Codeword) -> list[Share]:
    """Cut a codeword into the q contiguous hyperplane shares."""
    pps = cw.params.points_per_share
    return [
        Share(cw.params, ell, cw.symbols[ell * pps : (ell + 1) * pps])
        for ell in range(cw.params.q)
    ]


def concat_shares(shares: list[Share]) -> Codeword:
    params = shares[0].params
    if sorted(s.index for s in shares) != list(range(params.q)):
        raise ValueError("need exactly one share per hyperplane")
    ordered = sorted(shares, key=lambda s: s.index)
    symbols: list[EvalTuple] = []
    for s in ordered:
        symbols.extend(s.symbols)
    return Codeword(params, symbols)


def decode_codeword(params: CodeParams, symbols: list[EvalTuple]) -> MultiPoly:
    """Invert the encoder on a full, error-free codeword (desk scale).

    Solves for the k coefficients from the sigma*n derivative values;
    the encoder is injective for d < s(q-1) so the solution is unique.
    """
    if len(symbols) != params.n:
        raise ValueError("need a full codeword")
    fld = params.field
    basis = monomial_basis(params.m, params.d)
    from .field import binom_mod_p

    rows = []
    rhs = []
    for i in range(params.n):
        pt = index_point(params, i)
        pows = [[fld.pow(x, t) for t in range(params.d + 1)] for x in pt]
        for vi, v in enumerate(params.derivs):
            row = []
            for j in basis:
                scalar = 1
                for jt, vt in zip(j, v):
                    scalar = (scalar * binom_mod_p(jt, vt, fld.p)) % fld.p
                    if scalar == 0:
                        break
                if scalar == 0:
                    row.append(0)
                    continue
                term = scalar
                for t, (jt, vt) in enumerate(zip(j, v)):
                    term = fld.mul(term, pows[t][jt - vt])
                row.append(term)
            rows.append(row)
            rhs.append(symbols[i][vi])
    coeffs = solve(fld, rows, rhs)
    return MultiPoly(fld, params.m, dict(zip(basis, coeffs)))


# -- line geometry ---------------------------------------------------------


def transversal_directions(params: CodeParams):
    """Canonical directions of lines meeting every hyperplane once.

    Normalized so the last coordinate is 1; there are q^{m-1} of them.
    """
    q = params.q
    for i in range(q ** (params.m - 1)):
        coords = []
        for _ in range(params.m - 1):
            coords.append(i % q)
            i //= q
        coords.append(1)
        yield tuple(coords)


def transversal_direction_count(params: CodeParams) -> int:
    return params.q ** (params.m - 1)


def direction_class_count(params: CodeParams) -> int:
    """All direction classes (lines through a point, up to scalar)."""
    return (params.q ** params.m - 1) // (params.q - 1)


def sample_transversal_directions(params: CodeParams, rng, count: int) -> list[Point]:
    """Uniform sample without replacement from the transversal classes."""
    total = transversal_direction_count(params)
    if count > total:
        raise ParameterError(f"cannot pick {count} of {total} transversal classes")
    picks = rng.sample(range(total), count)
    q = params.q
    out = []
    for i in picks:
        coords = []
        for _ in range(params.m - 1):
            coords.append(i % q)
            i //= q
        coords.append(1)
        out.append(tuple(coords))
    return out


def sample_directions(params: CodeParams, rng, count: int) -> list[Point]:
    """Uniform distinct direction classes, transversal or not.

    Classes are canonicalized by scaling the last nonzero coordinate to 1;
    rejection sampling of nonzero vectors is uniform because every class
    contains exactly q-1 vectors.
    """
    total = direction_class_count(params)
    if count > total:
        raise ParameterError(f"cannot pick {count} of {total} direction classes")
    fld = params.field
    seen: dict[Point, None] = {}
    while len(seen) < count:
        vec = tuple(rng.randrange(params.q) for _ in range(params.m))
        if all(x == 0 for x in vec):
            continue
        last_nz = max(i for i, x in enumerate(vec) if x != 0)
        scale = fld.inv(vec[last_nz])
        seen[tuple(fld.mul(x, scale) for x in vec)] = None
    return list(seen)


# -- parameter table -------------------------------------------------------


@dataclass(frozen=True)
class SchemeRow:
    """One row of the scheme-properties table."""

    q: int
    m: int
    s: int
    d: int
    k: int
    queries: int
    servers: int
    std_overhead: float
    overhead: float
    std_comm: float
    comm: float


def scheme_table(fld: Field, m: int, s: int, d: int) -> SchemeRow:
    """Storage and communication figures for one parameter choice.

    "std" columns describe the classical reduction that replicates the
    encoded database on every one of the (q-1)*sigma queried servers; the
    partitioned layout stores each symbol once and contacts q servers.
    """
    params = make_params(fld, m, s, d)
    q = fld.q
    log2q = math.log2(q)
    queries = params.queries
    inv_rate = 1 / params.rate
    std_comm = queries * (m + params.sigma) * log2q
    comm = (m - 1 + params.sigma) * q * params.sigma * log2q
    return SchemeRow(
        q=q,
        m=m,
        s=s,
        d=d,
        k=params.k,
        queries=queries,
        servers=q,
        std_overhead=float((q - 1) * inv_rate),
        overhead=float(inv_rate),
        std_comm=std_comm,
        comm=comm,
    )


def uplink_bits(params: CodeParams) -> float:
    """Query payload: sigma points of m-1 coordinates to each of q servers."""
    return params.q * params.sigma * (params.m - 1) * math.log2(params.q)


def downlink_bits(params: CodeParams) -> float:
    """Answer payload: sigma tuples of sigma symbols from each server."""
    return params.q * params.sigma ** 2 * math.log2(params.q)
