import math

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from siegellab.characters import (RealPrimitiveCharacter, character_values_period,
                                  enumerate_fundamental_discriminants, gauss_sum,
                                  is_fundamental_discriminant, jacobi, kronecker,
                                  product_primitive)
from siegellab.errors import EqualCharacters, NotFundamental

DISCS = enumerate_fundamental_discriminants(200)


def test_is_fundamental_examples():
    assert is_fundamental_discriminant(-3)
    assert is_fundamental_discriminant(8)
    assert is_fundamental_discriminant(12)
    assert not is_fundamental_discriminant(9)
    assert not is_fundamental_discriminant(1)
    assert not is_fundamental_discriminant(15)


def test_enumeration_examples():
    assert enumerate_fundamental_discriminants(8) == [-3, -4, 5, -7, 8, -8]
    assert enumerate_fundamental_discriminants(3) == [-3]
    ds = enumerate_fundamental_discriminants(15)
    assert 13 in ds and -15 in ds and 15 not in ds
    with pytest.raises(ValueError):
        enumerate_fundamental_discriminants(2)


def test_enumeration_matches_brute_force():
    brute = [d for a in range(3, 301) for d in (a, -a) if is_fundamental_discriminant(d)]
    assert enumerate_fundamental_discriminants(300) == brute


def test_kronecker_examples():
    assert kronecker(-4, 3) == -1
    assert kronecker(5, 2) == -1
    assert kronecker(8, 7) == 1
    assert kronecker(1, 0) == 1 and kronecker(5, 0) == 0
    assert kronecker(-3, -1) == -1 and kronecker(5, -1) == 1


def _legendre(a, p):
    r = pow(a % p, (p - 1) // 2, p)
    return 0 if r == 0 else (1 if r == 1 else -1)


@given(st.integers(-10**6, 10**6), st.sampled_from([3, 5, 7, 11, 13, 101, 1009]))
def test_jacobi_matches_euler_criterion(a, p):
    assert jacobi(a, p) == _legendre(a, p)


def test_values_period_examples():
    assert character_values_period(RealPrimitiveCharacter(-4)) == [1, 0, -1, 0]
    assert character_values_period(RealPrimitiveCharacter(5)) == [1, -1, -1, 1, 0]
    assert character_values_period(RealPrimitiveCharacter(-3)) == [1, -1, 0]


def test_constructor_rejects_non_fundamental():
    for d in (0, 1, 9, 15, -16):
        with pytest.raises(NotFundamental):
            RealPrimitiveCharacter(d)


@settings(max_examples=200)
@given(st.sampled_from(DISCS), st.integers(1, 2000), st.integers(1, 2000))
def test_complete_multiplicativity(d, m, n):
    assert kronecker(d, m * n) == kronecker(d, m) * kronecker(d, n)


@settings(max_examples=200)
@given(st.sampled_from(DISCS), st.integers(1, 10**5))
def test_periodicity_and_support(d, n):
    chi = RealPrimitiveCharacter(d)
    assert chi(n) == chi(n + chi.q) == kronecker(d, n)
    assert (chi(n) == 0) == (math.gcd(n, chi.q) > 1)


@pytest.mark.parametrize("d", DISCS)
def test_parity(d):
    chi = RealPrimitiveCharacter(d)
    assert (kronecker(d, -1) == 1) == chi.is_even
    assert chi.parity == ("even" if d > 0 else "odd")


@pytest.mark.parametrize("d", [-3, -4, 5, 8, -8, 12, -95, 173, -199])
def test_gauss_sum_magnitude(d):
    g = gauss_sum(RealPrimitiveCharacter(d), dps=30)
    assert abs(abs(g) - mpmath.sqrt(abs(d))) < mpmath.mpf(10) ** -20


@pytest.mark.parametrize("d1,d2,expected", [(-4, 8, -8), (5, 8, 40), (-3, -4, 12)])
def test_product_primitive_examples(d1, d2, expected):
    c1, c2 = RealPrimitiveCharacter(d1), RealPrimitiveCharacter(d2)
    psi = product_primitive(c1, c2)
    assert psi.d == expected
    assert product_primitive(c2, c1).d == expected
    for n in range(1, 200):
        if math.gcd(n, c1.q * c2.q) == 1:
            assert psi(n) == c1(n) * c2(n)


@settings(max_examples=100)
@given(st.sampled_from(DISCS), st.sampled_from(DISCS))
def test_product_primitive_pointwise(d1, d2):
    c1, c2 = RealPrimitiveCharacter(d1), RealPrimitiveCharacter(d2)
    if d1 == d2:
        with pytest.raises(EqualCharacters):
            product_primitive(c1, c2)
        return
    psi = product_primitive(c1, c2)
    assert psi.q <= c1.q * c2.q
    for n in range(1, 300):
        if math.gcd(n, c1.q * c2.q) == 1:
            assert psi(n) == c1(n) * c2(n)
