"""Arithmetic in GF(p^e) with a fixed, serialization-friendly element order.

Elements are plain Python ints in ``[0, q)``: the base-p digits of the int
are the coefficients of the element's polynomial representation, so the
integer value of the coefficient vector *is* the element's position in the
canonical enumeration (0 comes first, then 1, 2, ...).  Multiplication and
inversion go through log/antilog tables built once at construction.
"""

from __future__ import annotations

import math
from functools import lru_cache

# Pinned moduli so that share files and wire messages are interoperable
# between independently built clients and servers.  Coefficient lists are
# ascending: index i holds the coefficient of x^i.
_FIXED_MODULI = {
    (2, 4): (1, 1, 0, 0, 1),                    # x^4 + x + 1
    (2, 8): (1, 1, 0, 1, 1, 0, 0, 0, 1),        # x^8 + x^4 + x^3 + x + 1
}

_MAX_ORDER = 1 << 16


class FieldError(ValueError):
    pass


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def _digits(value: int, p: int, width: int) -> list[int]:
    out = []
    for _ in range(width):
        out.append(value % p)
        value //= p
    return out


def _from_digits(digits, p: int) -> int:
    value = 0
    for d in reversed(digits):
        value = value * p + d
    return value


def _poly_mod(num: list[int], den: list[int], p: int) -> list[int]:
    """Remainder of num / den over GF(p), coefficient lists ascending."""
    num = num[:]
    dd = len(den) - 1
    inv_lead = pow(den[-1], -1, p)
    for k in range(len(num) - 1, dd - 1, -1):
        c = num[k]
        if c == 0:
            continue
        f = (c * inv_lead) % p
        for i, dc in enumerate(den):
            num[k - dd + i] = (num[k - dd + i] - f * dc) % p
    return num[:dd]


def _is_irreducible(coeffs: list[int], p: int) -> bool:
    """Trial division by every monic polynomial of degree 1..deg/2."""
    e = len(coeffs) - 1
    for deg in range(1, e // 2 + 1):
        for v in range(p ** deg):
            den = _digits(v, p, deg) + [1]
            if not any(_poly_mod(list(coeffs), den, p)):
                return False
    return True


def _find_modulus(p: int, e: int) -> tuple[int, ...]:
    if (p, e) in _FIXED_MODULI:
        return _FIXED_MODULI[(p, e)]
    # Candidates ordered by the integer whose base-p expansion (coefficient
    # of x^i at digit i) encodes them; that is lexicographic smallest-first
    # on coefficient tuples read from the leading term down.
    for v in range(p ** e):
        coeffs = _digits(v, p, e) + [1]
        if _is_irreducible(coeffs, p):
            return tuple(coeffs)
    raise FieldError(f"no irreducible polynomial of degree {e} over GF({p})")


def _prime_factors(n: int) -> list[int]:
    out = []
    f = 2
    while f * f <= n:
        if n % f == 0:
            out.append(f)
            while n % f == 0:
                n //= f
        f += 1
    if n > 1:
        out.append(n)
    return out


class Field:
    """GF(p^e) together with its canonical element enumeration.

    Immutable after construction; all operations are pure functions of
    their int arguments, so instances are safe to share across threads.
    """

    def __init__(self, p: int, e: int):
        if not _is_prime(p):
            raise FieldError(f"characteristic {p} is not prime")
        if not 1 <= e <= 16:
            raise FieldError(f"extension degree {e} out of range [1, 16]")
        q = p ** e
        if q > _MAX_ORDER:
            raise FieldError(f"field order {q} exceeds 2^16")
        self.p = p
        self.e = e
        self.q = q
        self.modulus = _find_modulus(p, e)
        if not _is_irreducible(list(self.modulus), p):
            raise FieldError(f"modulus {self.modulus} is reducible over GF({p})")
        self._build_tables()

    # -- construction helpers -------------------------------------------

    def _mul_raw(self, a: int, b: int) -> int:
        """Table-free product, used only to bootstrap the log tables."""
        p, e = self.p, self.e
        if p == 2:
            mod_int = _from_digits(self.modulus, 2)
            out = 0
            while b:
                if b & 1:
                    out ^= a
                a <<= 1
                if a >> e & 1:
                    a ^= mod_int
                b >>= 1
            return out
        da = _digits(a, p, e)
        db = _digits(b, p, e)
        prod = [0] * (2 * e - 1)
        for i, ca in enumerate(da):
            if ca:
                for j, cb in enumerate(db):
                    prod[i + j] = (prod[i + j] + ca * cb) % p
        return _from_digits(_poly_mod(prod, list(self.modulus), p), p)

    def _pow_raw(self, a: int, k: int) -> int:
        out = 1
        while k:
            if k & 1:
                out = self._mul_raw(out, a)
            a = self._mul_raw(a, a)
            k >>= 1
        return out

    def _build_tables(self):
        q = self.q
        if q == 2:
            gen = 1
        else:
            factors = _prime_factors(q - 1)
            gen = None
            for cand in range(2, q):
                if all(self._pow_raw(cand, (q - 1) // f) != 1 for f in factors):
                    gen = cand
                    break
            if gen is None:
                raise FieldError("no primitive element found")  # pragma: no cover
        exp = [0] * (q - 1)
        log = [0] * q
        v = 1
        for i in range(q - 1):
            exp[i] = v
            log[v] = i
            v = self._mul_raw(v, gen)
        self.generator = gen
        self._exp = exp
        self._log = log
        # numpy copies for the compiled linear-algebra kernels
        import numpy as np

        self.exp_np = np.array(exp, dtype=np.int64)
        self.log_np = np.array(log, dtype=np.int64)

    # -- arithmetic ------------------------------------------------------

    def add(self, a: int, b: int) -> int:
        p = self.p
        if p == 2:
            return a ^ b
        out = 0
        mult = 1
        while a or b:
            out += ((a + b) % p) * mult
            a //= p
            b //= p
            mult *= p
        return out

    def neg(self, a: int) -> int:
        p = self.p
        if p == 2:
            return a
        out = 0
        mult = 1
        while a:
            out += (-a % p) * mult
            a //= p
            mult *= p
        return out

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return self._exp[(self._log[a] + self._log[b]) % (self.q - 1)]

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("zero has no multiplicative inverse")
        return self._exp[(self.q - 1 - self._log[a]) % (self.q - 1)]

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, k: int) -> int:
        if a == 0:
            if k == 0:
                return 1
            if k < 0:
                raise ZeroDivisionError("negative power of zero")
            return 0
        return self._exp[(self._log[a] * k) % (self.q - 1)]

    # -- enumeration -----------------------------------------------------

    def elements(self) -> range:
        return range(self.q)

    def nonzero_elements(self) -> range:
        return range(1, self.q)

    def coeffs(self, a: int) -> tuple[int, ...]:
        """Base-p coefficient vector of an element, ascending powers."""
        return tuple(_digits(a, self.p, self.e))

    def from_coeffs(self, digits) -> int:
        return _from_digits(list(digits), self.p)

    def check_element(self, a: int) -> int:
        if not 0 <= a < self.q:
            raise FieldError(f"{a} is not an element of GF({self.q})")
        return a

    # -- identity --------------------------------------------------------

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Field)
            and self.p == other.p
            and self.e == other.e
            and self.modulus == other.modulus
        )

    def __hash__(self):
        return hash((self.p, self.e, self.modulus))

    def __repr__(self):
        return f"Field(p={self.p}, e={self.e}, q={self.q})"


@lru_cache(maxsize=None)
def make_field(p: int, e: int) -> Field:
    return Field(p, e)


@lru_cache(maxsize=None)
def field_of_order(q: int) -> Field:
    """Field with exactly q elements; q must be a prime power <= 2^16."""
    if q < 2:
        raise FieldError(f"{q} is not a prime power")
    p = q
    f = 2
    while f * f <= q:
        if q % f == 0:
            p = f
            break
        f += 1
    e = 0
    n = q
    while n % p == 0:
        n //= p
        e += 1
    if n != 1:
        raise FieldError(f"{q} is not a prime power")
    return make_field(p, e)


def binom_mod_p(j: int, i: int, p: int) -> int:
    """Binomial coefficient C(j, i) reduced into GF(p); 0 when i > j."""
    if i < 0 or i > j:
        return 0
    return math.comb(j, i) % p
