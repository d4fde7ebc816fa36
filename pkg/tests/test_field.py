"""Exact field arithmetic: prime fields and the rationals."""

from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from isoalg.field import Field, FieldError, is_prime


def test_is_prime_small():
    primes = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47}
    for n in range(-2, 50):
        assert is_prime(n) == (n in primes)


def test_is_prime_larger():
    assert is_prime(7919)
    assert not is_prime(7917)
    assert is_prime(2 ** 61 - 1)
    assert not is_prime(2 ** 61 + 1)


def test_bad_characteristic():
    for c in (1, 4, 6, 9, -2):
        with pytest.raises(FieldError):
            Field(c)


@pytest.mark.parametrize("p", [2, 3, 5])
def test_prime_field_axioms_exhaustive(p):
    f = Field(p)
    els = list(f.elements())
    assert els == list(range(p))
    for a in els:
        assert f.add(a, f.zero) == a
        assert f.mul(a, f.one) == a
        assert f.add(a, f.neg(a)) == f.zero
        if a != f.zero:
            assert f.mul(a, f.inv(a)) == f.one
        for b in els:
            assert f.add(a, b) == f.add(b, a)
            assert f.mul(a, b) == f.mul(b, a)
            assert f.sub(a, b) == f.add(a, f.neg(b))
            if b != f.zero:
                assert f.mul(f.div(a, b), b) == a
            for c in els:
                assert f.add(f.add(a, b), c) == f.add(a, f.add(b, c))
                assert f.mul(f.mul(a, b), c) == f.mul(a, f.mul(b, c))
                assert f.mul(a, f.add(b, c)) == f.add(f.mul(a, b), f.mul(a, c))


def test_rationals_exact():
    f = Field(0)
    third = f.div(f.one, f.elem(3))
    assert third == Fraction(1, 3)
    assert f.add(third, f.add(third, third)) == f.one
    assert f.elem(Fraction(2, 4)) == Fraction(1, 2)
    with pytest.raises(FieldError):
        f.inv(f.zero)


def test_elem_normalizes_mod_p():
    f = Field(3)
    assert f.elem(5) == 2
    assert f.elem(-1) == 2
    with pytest.raises(FieldError):
        f.check(3)


def test_elements_only_finite():
    with pytest.raises(FieldError):
        list(Field(0).elements())


@given(st.integers(-50, 50), st.integers(-50, 50), st.integers(-50, 50))
def test_gf5_homomorphic_from_integers(a, b, c):
    f = Field(5)
    assert f.elem(a + b * c) == f.add(f.elem(a), f.mul(f.elem(b), f.elem(c)))


@given(st.fractions(min_value=-30, max_value=30, max_denominator=10),
       st.fractions(min_value=-30, max_value=30, max_denominator=10))
def test_rational_ops_match_fractions(a, b):
    f = Field(0)
    assert f.add(f.elem(a), f.elem(b)) == a + b
    assert f.mul(f.elem(a), f.elem(b)) == a * b
    if b != 0:
        assert f.div(f.elem(a), f.elem(b)) == Fraction(a, b)
