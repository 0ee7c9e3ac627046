"""Per-line decoding: Hermite interpolation and Berlekamp-Welch.

A line word holds, for each of the q-1 nonzero field points, the s
claimed Hasse derivative values (orders 0..s-1) of a univariate
polynomial of degree <= d.  The error-free path interpolates directly;
the robust path searches for polynomials N, E with N = E*F on every
consistent position and divides them out, correcting up to
t = floor((n - d/s)/2) wrong positions.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import _kernels
from .field import Field, binom_mod_p
from .gflinalg import InconsistentSystemError, SingularSystemError
from .mpoly import uni_trim


class LineDecodingError(ValueError):
    """A line word is too corrupted for the per-line decoder."""


@dataclass
class LineWord:
    """Claimed derivative data along one line, sorted by point enumeration.

    values[b-1] is the s-tuple at the b-th nonzero field element.
    """

    field: Field
    s: int
    values: list[tuple[int, ...]]

    def __post_init__(self):
        if len(self.values) != self.field.q - 1:
            raise ValueError(
                f"need q-1 = {self.field.q - 1} positions, got {len(self.values)}"
            )
        for v in self.values:
            if len(v) != self.s:
                raise ValueError("every position must carry s values")

    @property
    def n(self) -> int:
        return len(self.values)


def decoding_radius(n: int, d: int, s: int) -> int:
    """Per-line error budget t = floor((n - d/s)/2), in whole positions."""
    return max(0, (s * n - d) // (2 * s))


@lru_cache(maxsize=64)
def _hermite_lhs(fld: Field, s: int, d: int) -> np.ndarray:
    """Confluent Vandermonde rows for orders < s at the q-1 nonzero points."""
    n = fld.q - 1
    rows = np.zeros((s * n, d + 1), dtype=np.int64)
    for b in range(1, n + 1):
        apow = [fld.pow(b, t) for t in range(d + 1)]
        for r in range(s):
            for k in range(r, d + 1):
                c = binom_mod_p(k, r, fld.p)
                if c:
                    rows[(b - 1) * s + r, k] = fld.mul(c, apow[k - r])
    rows.setflags(write=False)
    return rows


def hermite_interpolate(word: LineWord, d: int) -> list[int]:
    """The unique polynomial of degree <= d matching every claimed value.

    Raises InconsistentSystemError when no such polynomial exists, which
    the caller treats as the signal to fall back to robust decoding.
    """
    fld = word.field
    n, s = word.n, word.s
    if s * n < d + 1:
        raise ValueError(f"d = {d} underdetermined by {s * n} constraints")
    lhs = _hermite_lhs(fld, s, d)
    rhs = np.array(word.values, dtype=np.int64).reshape(-1, 1)
    M = np.hstack([lhs, rhs])
    piv = _kernels.rref(M, fld.exp_np, fld.log_np, fld.q - 1, fld.p)
    piv = list(piv)
    if d + 1 in piv:
        raise InconsistentSystemError("values fit no polynomial of that degree")
    if len(piv) < d + 1:
        # cannot happen for distinct points with s(q-1) >= d+1
        raise SingularSystemError("interpolation matrix is rank deficient")
    x = [0] * (d + 1)
    for i, c in enumerate(piv):
        x[c] = int(M[i, d + 1])
    return uni_trim(x)


def bw_decode(word: LineWord, d: int) -> list[int] | None:
    """Decode a line word with up to t wrong positions; None on failure.

    Solves the homogeneous system H^(r)N(a_i) = sum_j H^(j)E(a_i) y_{i,r-j}
    with deg N <= ceil((sn+d)/2) and deg E <= floor((sn-d)/2), then
    validates the candidate N/E by re-encoding and checking its distance
    to the word, so an exceeded error budget can never yield a silent
    wrong answer.
    """
    fld = word.field
    n, s = word.n, word.s
    t = decoding_radius(n, d, s)
    y = np.array(word.values, dtype=np.int64)
    alphas = np.arange(1, n + 1, dtype=np.int64)
    deg_n = (s * n + d + 1) // 2
    # s*n homogeneous equations in >= s*n + 2 unknowns: a nonzero solution
    # always exists
    assert deg_n + 1 + (s * n - d) // 2 + 1 >= s * n + 2
    binom = np.zeros((deg_n + 1, s), dtype=np.int64)
    for k in range(deg_n + 1):
        for r in range(min(s, k + 1)):
            binom[k, r] = binom_mod_p(k, r, fld.p)
    status, coeffs = _kernels.bw_decode_core(
        y, alphas, d, s, t, binom, fld.exp_np, fld.log_np, fld.q - 1, fld.p
    )
    if status != _kernels.BW_OK:
        return None
    return uni_trim([int(c) for c in coeffs])


def decode_line(word: LineWord, d: int) -> list[int]:
    """Interpolate when the word is consistent, otherwise decode robustly."""
    try:
        return hermite_interpolate(word, d)
    except InconsistentSystemError:
        pass
    got = bw_decode(word, d)
    if got is None:
        raise LineDecodingError(
            f"more than t = {decoding_radius(word.n, d, word.s)} corrupted positions"
        )
    return got
