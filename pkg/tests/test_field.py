import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from multipir.field import (
    Field,
    FieldError,
    binom_mod_p,
    field_of_order,
    make_field,
)


def test_make_field_orders():
    assert make_field(2, 4).q == 16
    assert make_field(2, 8).q == 256
    f5 = make_field(5, 1)
    assert f5.q == 5
    assert f5.modulus == (0, 1)  # the polynomial x


def test_pinned_moduli():
    assert make_field(2, 4).modulus == (1, 1, 0, 0, 1)
    assert make_field(2, 8).modulus == (1, 1, 0, 1, 1, 0, 0, 0, 1)


def test_rejects_bad_parameters():
    with pytest.raises(FieldError):
        Field(4, 2)  # not prime
    with pytest.raises(FieldError):
        Field(2, 0)
    with pytest.raises(FieldError):
        Field(2, 17)
    with pytest.raises(FieldError):
        Field(257, 2)  # 257^2 > 2^16


def test_field_of_order():
    assert field_of_order(16).q == 16
    assert field_of_order(7).q == 7
    with pytest.raises(FieldError):
        field_of_order(12)


def test_char2_addition(gf16):
    assert gf16.add(2, 2) == 0  # alpha_2 + alpha_2 in characteristic 2
    assert gf16.add(3, 3) == 0


def test_gf5_arithmetic(gf5):
    assert gf5.mul(3, 4) == 2  # 12 mod 5
    assert gf5.add(4, 3) == 2
    assert gf5.sub(1, 3) == 3
    assert gf5.neg(2) == 3


def test_inverse_exhaustive(gf16):
    for a in range(1, 16):
        assert gf16.mul(a, gf16.inv(a)) == 1
    with pytest.raises(ZeroDivisionError):
        gf16.inv(0)


@pytest.mark.parametrize("p,e", [(2, 2), (5, 1), (2, 3), (2, 4), (5, 2), (3, 2)])
def test_axioms_exhaustive_small(p, e):
    f = make_field(p, e)
    q = f.q
    for a in range(q):
        for b in range(q):
            assert f.add(a, b) == f.add(b, a)
            assert f.mul(a, b) == f.mul(b, a)
            for c in range(q):
                assert f.add(f.add(a, b), c) == f.add(a, f.add(b, c))
                assert f.mul(f.mul(a, b), c) == f.mul(a, f.mul(b, c))
                assert f.mul(a, f.add(b, c)) == f.add(f.mul(a, b), f.mul(a, c))


def test_axioms_exhaustive_gf256(gf256):
    # full q^3 triple check, vectorized through the arithmetic tables
    q = 256
    add = np.zeros((q, q), dtype=np.uint8)
    mul = np.zeros((q, q), dtype=np.uint8)
    for a in range(q):
        for b in range(q):
            add[a, b] = gf256.add(a, b)
            mul[a, b] = gf256.mul(a, b)
    assert np.array_equal(add, add.T) and np.array_equal(mul, mul.T)
    idx = np.arange(q)
    # associativity: (a op b) op c == a op (b op c) over all q^3 triples
    assert np.array_equal(
        add[add[:, :, None], idx[None, None, :]],
        add[idx[:, None, None], add[None, :, :]],
    )
    assert np.array_equal(
        mul[mul[:, :, None], idx[None, None, :]],
        mul[idx[:, None, None], mul[None, :, :]],
    )
    # distributivity: a*(b+c) == a*b + a*c
    lhs = mul[idx[:, None, None], add[None, :, :]]
    rhs = add[mul[:, :, None], mul[:, None, :]]
    assert np.array_equal(lhs, rhs)


@given(st.integers(0, 255), st.integers(0, 255))
def test_frobenius_gf256(gf256, a, b):
    lhs = gf256.pow(gf256.add(a, b), 2)
    rhs = gf256.add(gf256.pow(a, 2), gf256.pow(b, 2))
    assert lhs == rhs


@given(st.integers(0, 24), st.integers(0, 24))
def test_frobenius_gf25(a, b):
    f = make_field(5, 2)
    assert f.pow(f.add(a, b), 5) == f.add(f.pow(a, 5), f.pow(b, 5))


@pytest.mark.parametrize("p,e", [(2, 4), (2, 8), (5, 2), (3, 3)])
def test_enumeration_roundtrip(p, e):
    f = make_field(p, e)
    seen = set()
    for a in range(f.q):
        digits = f.coeffs(a)
        assert len(digits) == e and all(0 <= d < p for d in digits)
        assert f.from_coeffs(digits) == a
        seen.add(digits)
    assert len(seen) == f.q
    # alpha_0 = 0 and alpha_1 = 1 under the base-p digit enumeration
    assert f.from_coeffs((0,) * e) == 0
    assert f.coeffs(1)[0] == 1


def test_enumeration_stable_across_instances():
    a = Field(2, 4)
    b = Field(2, 4)
    assert a == b
    assert all(a.mul(x, y) == b.mul(x, y) for x in range(16) for y in range(16))


def test_pow_matches_repeated_multiplication(gf16, rng):
    for _ in range(200):
        a = rng.randrange(16)
        k = rng.randrange(10)
        expect = 1
        for _ in range(k):
            expect = gf16.mul(expect, a)
        assert gf16.pow(a, k) == expect
    assert gf16.pow(0, 0) == 1


def test_binom_mod_p_examples():
    assert binom_mod_p(3, 1, 2) == 1
    assert binom_mod_p(2, 1, 2) == 0
    # exact-integer oracle
    assert math.comb(10, 4) == 210
    assert binom_mod_p(10, 4, 5) == 210 % 5 == 0
    assert binom_mod_p(4, 6, 7) == 0  # i > j


@given(st.integers(0, 400), st.integers(0, 400), st.sampled_from([2, 3, 5, 7]))
def test_binom_mod_p_matches_comb(j, i, p):
    assert binom_mod_p(j, i, p) == (math.comb(j, i) % p if i <= j else 0)
