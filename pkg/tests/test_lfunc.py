import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from siegellab.characters import RealPrimitiveCharacter, enumerate_fundamental_discriminants
from siegellab.errors import AccuracyLoss, PoleAtOne, TailTooLarge
from siegellab.lfunc import (DEFAULT_CONTEXT, CharacterPair, EvaluationContext,
                             a_D_table, completed_l, d_function, d_function_times_pole,
                             dirichlet_l, dirichlet_side_derivative, dirichlet_tail_bound,
                             evaluate_l, hurwitz_zeta, l_values_np,
                             log_derivative_taylor_coefficient, neg_log_derivative_d, zeta)

TOL20 = mpmath.mpf(10) ** -20


def mp_oracle(s, d, dps=30):
    """mpmath's own Dirichlet L evaluation (chi listed from k = 0)."""
    chi = RealPrimitiveCharacter(d)
    v = chi.values()
    with mpmath.workdps(dps):
        return mpmath.dirichlet(mpmath.mpc(s), [0] + v[:-1])


def test_context_validation():
    with pytest.raises(ValueError):
        EvaluationContext(precision_digits=10)
    assert DEFAULT_CONTEXT.precision_digits == 30


def test_hurwitz_examples():
    with mpmath.workdps(30):
        assert abs(hurwitz_zeta(2, 1) - mpmath.pi ** 2 / 6) < mpmath.mpf(10) ** -28
        assert abs(hurwitz_zeta(0, 0.5)) < mpmath.mpf(10) ** -28
        third = mpmath.mpf(1) / 3
        ref = mpmath.zeta(mpmath.mpc(0.3, 7), third)
        assert abs(hurwitz_zeta(mpmath.mpc(0.3, 7), third) - ref) < TOL20
    with pytest.raises(PoleAtOne):
        hurwitz_zeta(1, 0.5)


def test_zeta_near_first_zero():
    assert abs(zeta(mpmath.mpc(0.5, "14.134725141734693790457251983562"))) < 1e-6
    with pytest.raises(PoleAtOne):
        zeta(1)


def test_l1_chi_minus4_leibniz():
    with mpmath.workdps(35):
        leibniz = mpmath.nsum(lambda k: (-1) ** k / (2 * k + 1), [0, mpmath.inf])
    assert abs(dirichlet_l(1, RealPrimitiveCharacter(-4)) - leibniz) < mpmath.mpf(10) ** -25


def test_l1_chi5_class_number_formula():
    chi = RealPrimitiveCharacter(5)
    with mpmath.workdps(35):
        cnf = 2 * mpmath.log((1 + mpmath.sqrt(5)) / 2) / mpmath.sqrt(5)
        # independent series: period-5 blocks summed by nsum
        series = mpmath.nsum(lambda k: sum(chi(int(a)) / (5 * k + a) for a in range(1, 6)),
                             [0, mpmath.inf])
    val = dirichlet_l(1, chi)
    assert abs(val - cnf) < TOL20
    assert abs(series - cnf) < TOL20
    assert abs(val - mpmath.mpf("0.4304089409640")) < 1e-12


@pytest.mark.parametrize("d", [5, 8, 12, 13])
def test_even_character_vanishes_at_zero(d):
    assert abs(dirichlet_l(0, RealPrimitiveCharacter(d))) < TOL20


@pytest.mark.parametrize("d,s", [(-95, (0.3, 30)), (40, (0.5, 2.5)), (-4, (2, -5)),
                                 (173, (-0.4, 12)), (-3, (1.2, 0.1))])
def test_against_mpmath_dirichlet(d, s):
    s = mpmath.mpc(*s)
    assert abs(dirichlet_l(s, RealPrimitiveCharacter(d)) - mp_oracle(s, d)) < TOL20


@settings(max_examples=25, deadline=None)
@given(st.sampled_from(enumerate_fundamental_discriminants(60)),
       st.floats(0, 1), st.floats(-30, 30))
def test_conjugate_symmetry(d, x, y):
    chi = RealPrimitiveCharacter(d)
    s = mpmath.mpc(x, y)
    a = dirichlet_l(s, chi)
    b = dirichlet_l(mpmath.conj(s), chi)
    with mpmath.workdps(30):
        assert abs(a - mpmath.conj(b)) < TOL20


@pytest.mark.parametrize("d,s", [(-4, (0.3, 2)), (8, (0.5, 0)), (5, (0.5, 0)),
                                 (-7, (0.1, 25)), (12, (0.9, -17))])
def test_functional_equation(d, s):
    chi = RealPrimitiveCharacter(d)
    s = mpmath.mpc(*s)
    with mpmath.workdps(30):
        a = completed_l(s, chi)
        b = completed_l(1 - s, chi)
        assert abs(a - b) < TOL20


def test_completed_real_on_critical_point():
    assert abs(mpmath.im(completed_l(0.5, RealPrimitiveCharacter(5)))) < TOL20


def test_euler_product_converges():
    chi = RealPrimitiveCharacter(-7)
    s = mpmath.mpc(2, 3)
    target = dirichlet_l(s, chi)
    errs = []
    for P in (10, 100, 1000):
        prod = mpmath.mpf(1)
        for p in mpmath.primerange(2, P + 1) if hasattr(mpmath, "primerange") else _primes(P):
            prod /= 1 - chi(p) * mpmath.mpf(p) ** (-s)
        errs.append(abs(prod - target))
    assert errs[0] > errs[1] > errs[2]


def _primes(P):
    return [p for p in range(2, P + 1) if all(p % q for q in range(2, int(p ** 0.5) + 1))]


@pytest.mark.parametrize("d", [None, -4, 40])
def test_numpy_backend_matches_mp(d):
    chi = None if d is None else RealPrimitiveCharacter(d)
    pts = np.array([0.5 + 14j, 0.2 + 100j, 1.4 - 3j, -0.5 + 50j, 0.7 + 400j])
    f, fp = l_values_np(pts, chi)
    for z, v, dv in zip(pts, f, fp):
        ref = evaluate_l(complex(z), chi, derivative=True, remove_pole=True)
        scale = max(1.0, float(abs(ref.value)))
        assert abs(complex(ref.value) - v) < 1e-11 * scale
        assert abs(complex(ref.derivative) - dv) < 1e-10 * max(1.0, float(abs(ref.derivative)))


def test_zeta_pole_removed():
    v = evaluate_l(1, None, remove_pole=True).value
    assert abs(v - 1) < TOL20


PAIR = CharacterPair.from_discriminants(5, 8)


def test_pair_ordering():
    assert PAIR.q1 == 8 and PAIR.q2 == 5 and PAIR.q_psi == 40
    assert PAIR.q_psi <= PAIR.q1 * PAIR.q2


def test_d_function_pole_and_limit():
    with pytest.raises(PoleAtOne):
        d_function(1, PAIR)
    lim = d_function_times_pole(1, PAIR)
    prod = 1
    for d in (5, 8, 40):
        prod *= dirichlet_l(1, RealPrimitiveCharacter(d))
    assert abs(lim - prod) < TOL20
    with mpmath.workdps(30):
        h = mpmath.mpf(10) ** -12
        near = d_function(1 + h, PAIR) * h
        assert abs(near - lim) < 1e-10


def test_d_function_conjugate_and_zero():
    s = mpmath.mpc(0.3, 4)
    with mpmath.workdps(30):
        assert abs(d_function(s, PAIR) - mpmath.conj(d_function(mpmath.conj(s), PAIR))) < TOL20
    rho = mpmath.mpc(0.5, "14.134725141734693790457251983562")
    assert abs(d_function(rho, PAIR)) < 1e-6


def test_a_D_examples():
    tab = a_D_table(PAIR, 1000)
    assert tab[2] == 0.0
    assert abs(tab[31] - 4 * math.log(31)) < 1e-12
    assert tab[6] == 0.0 and 6 not in tab.as_dict()
    assert (tab.values >= 0).all()


def test_a_D_brute_force():
    tab = a_D_table(PAIR, 500).as_dict()
    chars = PAIR.characters
    for n in range(2, 501):
        f = [p for p in range(2, n + 1) if n % p == 0 and all(p % q for q in range(2, p))]
        if len(f) != 1:
            assert n not in tab
            continue
        p = f[0]
        expect = (1 + sum(c(n) for c in chars)) * math.log(p)
        assert abs(tab[n] - expect) < 1e-12


def test_a_D_nonnegative_random_pairs():
    rng = np.random.default_rng(7)
    ds = enumerate_fundamental_discriminants(400)
    for _ in range(10):
        d1, d2 = rng.choice(ds, 2, replace=False)
        tab = a_D_table(CharacterPair.from_discriminants(int(d1), int(d2)), 10**5)
        assert (tab.values >= -1e-12).all()


def test_dirichlet_side_order_zero_matches_log_derivative():
    side = dirichlet_side_derivative(2.0, 0, PAIR, 10**6)
    exact = float(mpmath.re(neg_log_derivative_d(2, PAIR)))
    assert side.value <= exact + 1e-12
    assert exact <= side.value + side.tail_bound
    assert side.tail_bound < 1e-4


def test_dirichlet_side_monotone_in_sigma():
    a = dirichlet_side_derivative(1.2, 3, PAIR, 10**5).value
    b = dirichlet_side_derivative(1.05, 3, PAIR, 10**5).value
    assert a < b


def test_dirichlet_tail_too_large():
    with pytest.raises(TailTooLarge):
        dirichlet_side_derivative(1.05, 3, PAIR, 10**4, accuracy=1e-6)
    assert dirichlet_tail_bound(1.0, 1, 100) == math.inf


def test_taylor_coefficient_inside_series_sandwich():
    s, r = 1.5, 3
    c = log_derivative_taylor_coefficient(s, r, PAIR, 0.1)
    lhs = (-1) ** r * c.value + (s - 1) ** (-r - 1)
    side = dirichlet_side_derivative(s, r, PAIR, 10**6)
    assert side.value <= lhs <= side.value + side.tail_bound
    # against a finite-difference derivative of -D'/D
    with mpmath.workdps(40):
        f = lambda x: mpmath.re(neg_log_derivative_d(x, PAIR))
        ref = mpmath.diff(f, mpmath.mpf(s), r, h=mpmath.mpf("1e-6")) / mpmath.factorial(r)
    assert abs((-1) ** r * ref - lhs) < 1e-8 * abs(lhs)
