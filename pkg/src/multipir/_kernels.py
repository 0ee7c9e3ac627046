"""Compiled hot loops: GF(q) row reduction and per-line decoding.

Field elements are int64 scalars; multiplication uses the log/antilog
tables passed in from :class:`multipir.field.Field`.  Addition switches on
the characteristic: XOR for p=2, digit-wise mod p otherwise.  Everything
here is deterministic: first-nonzero pivoting, full reduction, and the
kernel vector with the last free variable set to 1.
"""

from __future__ import annotations

import numpy as np
from numba import njit

_NOPYTHON = dict(cache=True)


@njit(**_NOPYTHON)
def _add(a, b, p):
    if p == 2:
        return a ^ b
    out = 0
    mult = 1
    while a > 0 or b > 0:
        out += ((a + b) % p) * mult
        a //= p
        b //= p
        mult *= p
    return out


@njit(**_NOPYTHON)
def _neg(a, p):
    if p == 2:
        return a
    out = 0
    mult = 1
    while a > 0:
        out += ((-a) % p) * mult
        a //= p
        mult *= p
    return out


@njit(**_NOPYTHON)
def _mul(a, b, exp, log, qm1):
    if a == 0 or b == 0:
        return 0
    return exp[(log[a] + log[b]) % qm1]


@njit(**_NOPYTHON)
def _inv(a, exp, log, qm1):
    return exp[(qm1 - log[a]) % qm1]


@njit(**_NOPYTHON)
def rref(M, exp, log, qm1, p):
    """In-place reduced row echelon form; returns the pivot column array."""
    rows, cols = M.shape
    piv = np.empty(min(rows, cols), dtype=np.int64)
    r = 0
    for c in range(cols):
        pr = -1
        for i in range(r, rows):
            if M[i, c] != 0:
                pr = i
                break
        if pr < 0:
            continue
        if pr != r:
            for j in range(cols):
                t = M[r, j]
                M[r, j] = M[pr, j]
                M[pr, j] = t
        ip = _inv(M[r, c], exp, log, qm1)
        if ip != 1:
            for j in range(c, cols):
                M[r, j] = _mul(M[r, j], ip, exp, log, qm1)
        for i in range(rows):
            if i != r and M[i, c] != 0:
                f = M[i, c]
                for j in range(c, cols):
                    if M[r, j] != 0:
                        M[i, j] = _add(
                            M[i, j],
                            _neg(_mul(M[r, j], f, exp, log, qm1), p),
                            p,
                        )
        piv[r] = c
        r += 1
        if r == rows:
            break
    return piv[:r]


@njit(**_NOPYTHON)
def _poly_degree(cs):
    for k in range(len(cs) - 1, -1, -1):
        if cs[k] != 0:
            return k
    return -1


@njit(**_NOPYTHON)
def _poly_divmod(num, den, exp, log, qm1, p):
    """Quotient and remainder of num/den; den must be nonzero."""
    dn = _poly_degree(num)
    dd = _poly_degree(den)
    quo = np.zeros(max(dn - dd + 1, 1), dtype=np.int64)
    rem = num.copy()
    ild = _inv(den[dd], exp, log, qm1)
    for k in range(dn - dd, -1, -1):
        c = rem[k + dd]
        if c == 0:
            continue
        f = _mul(c, ild, exp, log, qm1)
        quo[k] = f
        for i in range(dd + 1):
            rem[k + i] = _add(
                rem[k + i], _neg(_mul(f, den[i], exp, log, qm1), p), p
            )
    return quo, rem


BW_OK = 0
BW_NO_KERNEL = 1
BW_NO_CANDIDATE = 2


@njit(**_NOPYTHON)
def _try_candidate(x, nn, d, t, y, alphas, binom, exp, log, qm1, p, out):
    """Divide N/E for one kernel vector and validate against the word.

    A candidate passes when E divides N exactly, the quotient has degree
    at most d, and re-encoding it differs from y in at most t positions
    (a position is wrong if any of its s values differs).  Fills ``out``
    and returns True on success.
    """
    num = x[:nn]
    den = x[nn:]
    if _poly_degree(den) < 0:
        return False
    quo, rem = _poly_divmod(num, den, exp, log, qm1, p)
    if _poly_degree(rem) >= 0:
        return False
    dq = _poly_degree(quo)
    if dq > d:
        return False
    n, s = y.shape
    apow = np.empty(d + 1, dtype=np.int64)
    wrong = 0
    for i in range(n):
        a = alphas[i]
        apow[0] = 1
        for k in range(1, dq + 1):
            apow[k] = _mul(apow[k - 1], a, exp, log, qm1)
        bad = False
        for r in range(s):
            acc = 0
            for k in range(r, dq + 1):
                c = binom[k, r]
                if c != 0 and quo[k] != 0:
                    term = _mul(c, quo[k], exp, log, qm1)
                    acc = _add(acc, _mul(term, apow[k - r], exp, log, qm1), p)
            if acc != y[i, r]:
                bad = True
        if bad:
            wrong += 1
            if wrong > t:
                return False
    for k in range(d + 1):
        out[k] = quo[k] if k <= dq else 0
    return True


@njit(**_NOPYTHON)
def bw_decode_core(y, alphas, d, s, t, binom, exp, log, qm1, p):
    """Berlekamp-Welch style decoding of one line word.

    y has shape (n, s): claimed Hasse derivative values at the n = q-1
    nonzero field points ``alphas``.  Returns (status, coeffs) where
    coeffs has length d+1 and is only meaningful for status BW_OK.

    Below the exact decoding radius every nonzero kernel vector of the
    linear system yields the same polynomial, so the first candidate (the
    one with the last free variable set to 1) succeeds immediately.  At
    the radius boundary 2*s*t = s*n - d the kernel picks up spurious
    directions; candidates are then swept in a fixed order over low-
    dimensional kernels, and validation rejects everything that is not a
    codeword within distance t.
    """
    n = y.shape[0]
    sn = s * n
    deg_n = (sn + d + 1) // 2
    deg_e = (sn - d) // 2
    nn = deg_n + 1
    ne = deg_e + 1
    ncols = nn + ne
    M = np.zeros((sn, ncols), dtype=np.int64)
    apow = np.empty(deg_n + 1, dtype=np.int64)
    for i in range(n):
        a = alphas[i]
        apow[0] = 1
        for k in range(1, deg_n + 1):
            apow[k] = _mul(apow[k - 1], a, exp, log, qm1)
        for r in range(s):
            row = i * s + r
            for k in range(r, nn):
                c = binom[k, r]
                if c != 0:
                    M[row, k] = _mul(c, apow[k - r], exp, log, qm1)
            for j in range(ne):
                acc = 0
                top = r if r < j else j
                for u in range(top + 1):
                    c = binom[j, u]
                    if c != 0:
                        term = _mul(c, apow[j - u], exp, log, qm1)
                        term = _mul(term, y[i, r - u], exp, log, qm1)
                        acc = _add(acc, term, p)
                M[row, nn + j] = _neg(acc, p)
    piv = rref(M, exp, log, qm1, p)
    rank = len(piv)
    coeffs = np.zeros(d + 1, dtype=np.int64)
    if rank == ncols:
        return BW_NO_KERNEL, coeffs
    is_piv = np.zeros(ncols, dtype=np.int64)
    for i in range(rank):
        is_piv[piv[i]] = 1
    g = ncols - rank
    free = np.empty(g, dtype=np.int64)
    w = 0
    for c in range(ncols):
        if is_piv[c] == 0:
            free[w] = c
            w += 1

    x = np.empty(ncols, dtype=np.int64)
    cvec = np.zeros(g, dtype=np.int64)

    # unit vectors, last free column first
    for u in range(g - 1, -1, -1):
        for j in range(g):
            cvec[j] = 0
        cvec[u] = 1
        _kernel_combination(M, piv, rank, free, cvec, x, p, exp, log, qm1)
        if _try_candidate(x, nn, d, t, y, alphas, binom, exp, log, qm1, p, coeffs):
            return BW_OK, coeffs
    # sweep the remaining projective combinations for small kernels
    if g == 2:
        for lam in range(1, qm1 + 1):
            cvec[0] = 1
            cvec[1] = lam
            _kernel_combination(M, piv, rank, free, cvec, x, p, exp, log, qm1)
            if _try_candidate(x, nn, d, t, y, alphas, binom, exp, log, qm1, p, coeffs):
                return BW_OK, coeffs
    elif g == 3:
        for lam in range(1, qm1 + 1):
            cvec[0] = 0
            cvec[1] = 1
            cvec[2] = lam
            _kernel_combination(M, piv, rank, free, cvec, x, p, exp, log, qm1)
            if _try_candidate(x, nn, d, t, y, alphas, binom, exp, log, qm1, p, coeffs):
                return BW_OK, coeffs
        for a in range(qm1 + 1):
            for b in range(qm1 + 1):
                if a == 0 and b == 0:
                    continue
                cvec[0] = 1
                cvec[1] = a
                cvec[2] = b
                _kernel_combination(M, piv, rank, free, cvec, x, p, exp, log, qm1)
                if _try_candidate(x, nn, d, t, y, alphas, binom, exp, log, qm1, p, coeffs):
                    return BW_OK, coeffs
    return BW_NO_CANDIDATE, coeffs


@njit(**_NOPYTHON)
def _kernel_combination(M, piv, rank, free, cvec, x, p, exp, log, qm1):
    """Kernel vector for given free-variable values, from the RREF."""
    for c in range(len(x)):
        x[c] = 0
    for j in range(len(free)):
        x[free[j]] = cvec[j]
    for i in range(rank):
        acc = 0
        for j in range(len(free)):
            if cvec[j] != 0:
                acc = _add(acc, _mul(M[i, free[j]], cvec[j], exp, log, qm1), p)
        x[piv[i]] = _neg(acc, p)
