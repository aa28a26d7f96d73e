"""Real primitive Dirichlet characters as Kronecker symbols.

Every real primitive character is ``n -> (d/n)`` for a unique fundamental
discriminant ``d``; its conductor is ``|d|`` and it is even iff ``d > 0``.
All arithmetic here is exact integer arithmetic.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from math import isqrt

import numpy as np

from .errors import EqualCharacters, NotFundamental

# Squarefree kernels are found by trial division; fine for |d1*d2| up to
# TRIAL_DIVISION_LIMIT**2, i.e. discriminants up to about 10**6 each.
TRIAL_DIVISION_LIMIT = 10**6


def _is_squarefree(m: int) -> bool:
    m = abs(m)
    if m % 4 == 0:
        return False
    p = 3
    while p * p <= m:
        if m % (p * p) == 0:
            return False
        p += 2
    return True


def is_fundamental_discriminant(d: int) -> bool:
    """True iff ``d`` is the discriminant of a quadratic field."""
    if d in (0, 1):
        return False
    if d % 4 == 1:
        return _is_squarefree(d)
    if d % 4 == 0:
        m = d // 4
        return m % 4 in (2, 3) and _is_squarefree(m)
    return False


def enumerate_fundamental_discriminants(bound: int) -> list[int]:
    """All fundamental ``d`` with ``3 <= |d| <= bound``.

    Ordered by ``|d|``; when both signs occur the positive one comes first.
    """
    if bound < 3:
        raise ValueError("bound must be at least 3")
    out = []
    for a in range(3, bound + 1):
        for d in (a, -a):
            if is_fundamental_discriminant(d):
                out.append(d)
    return out


def jacobi(a: int, n: int) -> int:
    """Jacobi symbol (a/n) for odd positive n."""
    if n <= 0 or n % 2 == 0:
        raise ValueError("n must be odd and positive")
    a %= n
    result = 1
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def kronecker(d: int, n: int) -> int:
    """The Kronecker symbol (d/n), defined for all integers d and n."""
    if n == 0:
        return 1 if d in (1, -1) else 0
    result = 1
    if n < 0:
        n = -n
        if d < 0:
            result = -result
    v = 0
    while n % 2 == 0:
        n //= 2
        v += 1
    if v:
        if d % 2 == 0:
            return 0
        if v % 2 == 1 and d % 8 in (3, 5):
            result = -result
    if n == 1:
        return result
    return result * jacobi(d, n)


def _squarefree_kernel(m: int) -> int:
    """Signed squarefree part of m (m = kernel * square)."""
    if m == 0:
        raise ValueError("zero has no squarefree kernel")
    sign = -1 if m < 0 else 1
    m = abs(m)
    kernel = 1
    p = 2
    while p * p <= m:
        if p > TRIAL_DIVISION_LIMIT:
            raise ValueError("product too large for trial division")
        e = 0
        while m % p == 0:
            m //= p
            e += 1
        if e % 2:
            kernel *= p
        p += 1 if p == 2 else 2
    kernel *= m
    return sign * kernel


def fundamental_discriminant_of(m: int) -> int:
    """Discriminant of the quadratic field Q(sqrt(m)); m not a square."""
    k = _squarefree_kernel(m)
    if k == 1:
        raise ValueError(f"{m} is a perfect square")
    return k if k % 4 == 1 else 4 * k


@dataclass(frozen=True)
class RealPrimitiveCharacter:
    """The character n -> (d/n) for a fundamental discriminant d."""

    d: int
    _values: tuple = field(default=None, repr=False, compare=False, hash=False)

    def __post_init__(self):
        if not is_fundamental_discriminant(self.d):
            raise NotFundamental(f"{self.d} is not a fundamental discriminant")
        vals = tuple(kronecker(self.d, a) for a in range(1, abs(self.d) + 1))
        object.__setattr__(self, "_values", vals)

    @property
    def q(self) -> int:
        return abs(self.d)

    @property
    def parity(self) -> str:
        return "even" if self.d > 0 else "odd"

    @property
    def is_even(self) -> bool:
        return self.d > 0

    @property
    def a(self) -> int:
        """Gamma-factor shift: 0 for even, 1 for odd characters."""
        return 0 if self.d > 0 else 1

    def __call__(self, n: int) -> int:
        if n >= 1:
            return self._values[(n - 1) % self.q]
        return kronecker(self.d, n)

    def values(self) -> list[int]:
        return list(self._values)

    @cached_property
    def values_array(self) -> np.ndarray:
        return np.array(self._values, dtype=np.int64)

    def label(self) -> str:
        return f"chi_{self.d}"


def character_values_period(chi: RealPrimitiveCharacter) -> list[int]:
    """[chi(1), ..., chi(q)]."""
    return chi.values()


def product_primitive(chi1: RealPrimitiveCharacter,
                      chi2: RealPrimitiveCharacter) -> RealPrimitiveCharacter:
    """The primitive character inducing chi1*chi2."""
    if chi1.d == chi2.d:
        raise EqualCharacters("product of a character with itself is principal")
    return RealPrimitiveCharacter(fundamental_discriminant_of(chi1.d * chi2.d))


def gauss_sum(chi: RealPrimitiveCharacter, dps: int = 30):
    """sum_{a=1}^{q} chi(a) e(a/q) at ``dps`` digits (an mpmath mpc)."""
    import mpmath

    with mpmath.workdps(dps + 10):
        q = chi.q
        total = mpmath.mpc(0)
        for a, v in enumerate(chi.values(), start=1):
            if v:
                total += v * mpmath.expjpi(mpmath.mpf(2 * a) / q)
        return +total
