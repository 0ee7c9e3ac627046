"""Thin wrappers around the compiled GF(q) row-reduction kernel."""

from __future__ import annotations

import numpy as np

from . import _kernels
from .field import Field


class InconsistentSystemError(ValueError):
    """An overdetermined system has no solution."""


class SingularSystemError(ValueError):
    """A system expected to pin down all unknowns is rank deficient."""


def rref(field: Field, rows) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form of a matrix given as rows of ints."""
    M = np.array(rows, dtype=np.int64)
    if M.ndim != 2:
        raise ValueError("matrix must be two-dimensional")
    piv = _kernels.rref(M, field.exp_np, field.log_np, field.q - 1, field.p)
    return M, list(piv)


def solve(field: Field, a_rows, b) -> list[int]:
    """Unique solution of A x = b.

    A may have more rows than unknowns; every equation is checked.  Raises
    SingularSystemError when the unknowns are not fully determined and
    InconsistentSystemError when the equations contradict each other.
    """
    aug = [list(row) + [rhs] for row, rhs in zip(a_rows, b, strict=True)]
    ncols = len(aug[0]) - 1
    M, piv = rref(field, aug)
    if ncols in piv:
        raise InconsistentSystemError("no solution satisfies every equation")
    if len(piv) < ncols:
        raise SingularSystemError(f"rank {len(piv)} < {ncols} unknowns")
    x = [0] * ncols
    for i, c in enumerate(piv):
        x[c] = int(M[i, ncols])
    return x


def kernel_vector(field: Field, a_rows) -> list[int]:
    """Nonzero kernel vector with the last free variable set to 1.

    Deterministic: the result depends only on the matrix, not on the
    elimination order.  Raises SingularSystemError when the kernel is
    trivial.
    """
    M, piv = rref(field, a_rows)
    ncols = M.shape[1]
    pivset = set(piv)
    free = [c for c in range(ncols) if c not in pivset]
    if not free:
        raise SingularSystemError("kernel is trivial")
    last = free[-1]
    x = [0] * ncols
    x[last] = 1
    for i, c in enumerate(piv):
        x[c] = field.neg(int(M[i, last]))
    return x
