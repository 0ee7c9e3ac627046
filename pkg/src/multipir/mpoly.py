"""Multivariate polynomials over GF(q) and their Hasse calculus.

Multivariate polynomials are sparse (exponent tuple -> coefficient);
univariate ones are dense coefficient lists with the trailing entry
nonzero (the zero polynomial is the empty list).  The Hasse derivative
replaces d/dX in positive characteristic: the i-th Hasse derivative of F
is the coefficient of Z^i in F(X+Z).
"""

from __future__ import annotations

from .field import Field, binom_mod_p

Monomial = tuple[int, ...]


class MultiPoly:
    """Sparse polynomial in m variables over a fixed field."""

    __slots__ = ("field", "m", "coeffs")

    def __init__(self, field: Field, m: int, coeffs: dict[Monomial, int] | None = None):
        if m < 1:
            raise ValueError("need at least one variable")
        clean: dict[Monomial, int] = {}
        for exps, c in (coeffs or {}).items():
            if len(exps) != m:
                raise ValueError(f"monomial {exps} has wrong arity (m={m})")
            field.check_element(c)
            if c != 0:
                clean[tuple(exps)] = c
        self.field = field
        self.m = m
        self.coeffs = clean

    @property
    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        if not self.coeffs:
            return -1
        return max(sum(j) for j in self.coeffs)

    def is_zero(self) -> bool:
        return not self.coeffs

    def add(self, other: "MultiPoly") -> "MultiPoly":
        if other.field != self.field or other.m != self.m:
            raise ValueError("mismatched polynomials")
        out = dict(self.coeffs)
        fadd = self.field.add
        for j, c in other.coeffs.items():
            out[j] = fadd(out.get(j, 0), c)
        return MultiPoly(self.field, self.m, out)

    def scale(self, c: int) -> "MultiPoly":
        fmul = self.field.mul
        return MultiPoly(
            self.field, self.m, {j: fmul(v, c) for j, v in self.coeffs.items()}
        )

    def hasse_derivative(self, order: Monomial) -> "MultiPoly":
        """The order-indexed Hasse derivative, one index per variable."""
        if len(order) != self.m:
            raise ValueError(f"derivative index {order} has wrong arity")
        p = self.field.p
        fmul = self.field.mul
        fadd = self.field.add
        out: dict[Monomial, int] = {}
        for j, c in self.coeffs.items():
            scalar = 1
            for jt, it in zip(j, order):
                if jt < it:
                    scalar = 0
                    break
                scalar = (scalar * binom_mod_p(jt, it, p)) % p
            if scalar == 0:
                continue
            new = tuple(jt - it for jt, it in zip(j, order))
            term = fmul(c, scalar)
            prev = out.get(new)
            out[new] = term if prev is None else fadd(prev, term)
        return MultiPoly(self.field, self.m, out)

    def eval_at(self, point) -> int:
        """Substitute a point of F_q^m."""
        if len(point) != self.m:
            raise ValueError("point has wrong arity")
        f = self.field
        fpow, fmul, fadd = f.pow, f.mul, f.add
        acc = 0
        for j, c in self.coeffs.items():
            term = c
            for x, jt in zip(point, j):
                if jt:
                    term = fmul(term, fpow(x, jt))
                    if term == 0:
                        break
            acc = fadd(acc, term)
        return acc

    def restrict_to_line(self, point, direction) -> list[int]:
        """Coefficients of F(P + T*V), by exact substitution.

        This stays correct when deg F >= q, where interpolation from the
        q points of the line would be ambiguous.
        """
        f = self.field
        if len(point) != self.m or len(direction) != self.m:
            raise ValueError("point/direction have wrong arity")
        if all(v == 0 for v in direction):
            raise ValueError("direction must be nonzero")
        out = [0] * (max(self.degree, 0) + 1)
        for j, c in self.coeffs.items():
            term = [c]
            for pt, vt, jt in zip(point, direction, j):
                if jt == 0:
                    continue
                # (pt + vt*T)^jt expanded by the binomial theorem
                factor = [
                    f.mul(binom_mod_p(jt, i, f.p), f.mul(f.pow(pt, jt - i), f.pow(vt, i)))
                    for i in range(jt + 1)
                ]
                term = uni_mul(f, term, factor)
                if not term:
                    break
            for i, tc in enumerate(term):
                out[i] = f.add(out[i], tc)
        return uni_trim(out)

    def __eq__(self, other):
        return (
            isinstance(other, MultiPoly)
            and self.field == other.field
            and self.m == other.m
            and self.coeffs == other.coeffs
        )

    def __repr__(self):
        return f"MultiPoly(m={self.m}, terms={len(self.coeffs)}, deg={self.degree})"


def multi_indices_of_weight(m: int, w: int) -> list[Monomial]:
    """All exponent tuples of length m with component sum w, lex order."""
    if m == 1:
        return [(w,)]
    out = []
    for first in range(w + 1):
        out.extend((first,) + rest for rest in multi_indices_of_weight(m - 1, w - first))
    return out


def direction_power(field: Field, direction, index: Monomial) -> int:
    """V^j = prod_t V_t^{j_t}."""
    out = 1
    for v, j in zip(direction, index):
        if j:
            out = field.mul(out, field.pow(v, j))
    return out


def derivative_line_coeff(F: MultiPoly, point, direction, order: int) -> int:
    """Sum of F^{(j)}(P) V^j over |j| = order.

    Equals the order-th coefficient of F restricted to the line P + T*V.
    """
    if all(v == 0 for v in direction):
        raise ValueError("direction must be nonzero")
    f = F.field
    acc = 0
    for j in multi_indices_of_weight(F.m, order):
        val = F.hasse_derivative(j).eval_at(point)
        acc = f.add(acc, f.mul(val, direction_power(f, direction, j)))
    return acc


def derivative_line_value(F: MultiPoly, point, direction, order: int, alpha: int) -> int:
    """Sum of F^{(j)}(P + alpha*V) V^j over |j| = order.

    Equals the order-th Hasse derivative of the line restriction at alpha.
    """
    if all(v == 0 for v in direction):
        raise ValueError("direction must be nonzero")
    f = F.field
    shifted = tuple(f.add(pt, f.mul(alpha, vt)) for pt, vt in zip(point, direction))
    acc = 0
    for j in multi_indices_of_weight(F.m, order):
        val = F.hasse_derivative(j).eval_at(shifted)
        acc = f.add(acc, f.mul(val, direction_power(f, direction, j)))
    return acc


def random_poly(field: Field, m: int, max_deg: int, rng, n_terms: int | None = None) -> MultiPoly:
    """Random polynomial of total degree <= max_deg.

    Dense over the full monomial basis when n_terms is None, otherwise a
    sparse sample of that many monomials.
    """
    from .multcode import monomial_basis

    basis = monomial_basis(m, max_deg)
    if n_terms is not None and n_terms < len(basis):
        basis = rng.sample(basis, n_terms)
    return MultiPoly(
        field, m, {j: rng.randrange(field.q) for j in basis}
    )


# -- dense univariate helpers -------------------------------------------


def uni_trim(cs: list[int]) -> list[int]:
    while cs and cs[-1] == 0:
        cs.pop()
    return cs


def uni_degree(cs) -> int:
    return len(cs) - 1


def uni_add(field: Field, a, b) -> list[int]:
    n = max(len(a), len(b))
    out = [0] * n
    for i in range(n):
        x = a[i] if i < len(a) else 0
        y = b[i] if i < len(b) else 0
        out[i] = field.add(x, y)
    return uni_trim(out)


def uni_mul(field: Field, a, b) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    fadd, fmul = field.add, field.mul
    for i, x in enumerate(a):
        if x == 0:
            continue
        for j, y in enumerate(b):
            if y:
                out[i + j] = fadd(out[i + j], fmul(x, y))
    return uni_trim(out)


def uni_eval(field: Field, cs, x: int) -> int:
    acc = 0
    for c in reversed(cs):
        acc = field.add(field.mul(acc, x), c)
    return acc


def uni_hasse(field: Field, cs, order: int) -> list[int]:
    """Order-th Hasse derivative of a dense univariate polynomial."""
    p = field.p
    out = [0] * max(len(cs) - order, 0)
    for k in range(order, len(cs)):
        c = binom_mod_p(k, order, p)
        if c and cs[k]:
            out[k - order] = field.mul(cs[k], c)
    return uni_trim(out)


def uni_hasse_at(field: Field, cs, order: int, x: int) -> int:
    return uni_eval(field, uni_hasse(field, cs, order), x)
