"""Extended-precision evaluation of zeta, Hurwitz zeta, L(s, chi) and D(s).

All L-values go through one Euler-Maclaurin engine applied to the Hurwitz
decomposition

    L(s, chi) = q^{-s} sum_{a=1}^{q} chi(a) zeta(s, a/q).

Summing the first N terms of every Hurwitz series at once gives the ordinary
partial sum ``sum_{m <= Nq} chi(m) m^{-s}``; the remainders are handled with
Bernoulli corrections at ``X_a = N + a/q``.  For a nontrivial character the
``1/(s-1)`` pieces cancel exactly, which we exploit so that L is evaluated
stably straight through s = 1.

Two backends share the plan and the formulas: an mpmath one (the contract,
``precision_digits`` significant digits) and a vectorised float64 one used
for argument-principle sampling where a few thousand values are needed per
contour.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple

import mpmath
import numpy as np

from .characters import RealPrimitiveCharacter, product_primitive
from .errors import AccuracyLoss, EqualCharacters, PoleAtOne, TailTooLarge

# Chebyshev bound psi(x) < 1.03883 x for all x > 0 (Rosser-Schoenfeld 1962).
CHEBYSHEV_PSI_CONSTANT = 1.03883
_TWO_PI = 2 * math.pi


@dataclass(frozen=True)
class EvaluationContext:
    """Precision and truncation policy for every evaluator.

    ``em_order`` caps the number of Bernoulli corrections (``None`` lets the
    planner choose); ``derivative_step`` overrides the Cauchy-circle radius.
    """

    precision_digits: int = 30
    em_order: int | None = None
    derivative_step: float | None = None

    def __post_init__(self):
        if self.precision_digits < 15:
            raise ValueError("precision_digits must be at least 15")
        if self.em_order is not None and self.em_order < 1:
            raise ValueError("em_order must be positive")

    @property
    def tolerance(self) -> float:
        return 10.0 ** (-self.precision_digits)

    @property
    def error_ceiling(self) -> float:
        """Largest a-posteriori error an evaluation may report."""
        return 10.0 ** (-self.precision_digits + 5)

    @property
    def is_double(self) -> bool:
        return self.precision_digits <= 15


DEFAULT_CONTEXT = EvaluationContext()
DOUBLE_CONTEXT = EvaluationContext(precision_digits=15)


class LValue(NamedTuple):
    value: object
    derivative: object
    error: float


# ---------------------------------------------------------------------------
# Euler-Maclaurin planning
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _log_abs_bernoulli_coeff(j: int) -> float:
    """log |B_{2j} / (2j)!| = log(2 zeta(2j)) - 2j log(2 pi)."""
    z2j = 1.0 + sum(k ** (-2.0 * j) for k in range(2, 60))
    return math.log(2 * z2j) - 2 * j * math.log(_TWO_PI)


class _Plan(NamedTuple):
    N: int
    J: int
    log_error: float
    log_max_term: float


def _plan(abs_s: float, sigma: float, q: int, x_offset: float, digits: int,
          em_order: int | None) -> _Plan:
    """Smallest head length N whose Bernoulli tail reaches 10^-digits.

    ``abs_s`` and ``sigma`` are worst cases over the batch (largest |s|,
    smallest Re s); ``x_offset`` is the smallest fractional shift a/q.
    Term j is bounded by 2 zeta(2j) (2 pi)^{-2j} prod|s+i| X^{-sigma-2j+1},
    times q^{1-sigma} for the q Hurwitz pieces; the remainder after J terms
    is at most |s+2J+1|/(sigma+2J+1) times term J+1 (Backlund).
    """
    jmax = em_order if em_order is not None else 400
    log_tol = -digits * math.log(10.0)
    log_q = (1.0 - sigma) * math.log(q) if q > 1 else 0.0
    N = max(1, int(abs_s / _TWO_PI) - 2)
    while True:
        X = N + x_offset
        lx = math.log(X)
        log_poch = math.log(abs_s)  # |s| bounds |P_1(s)| = |s|
        max_term = -math.inf
        best = None
        prev = math.inf
        for j in range(1, jmax + 2):
            if j > 1:
                log_poch += math.log(abs_s + 2 * j - 3) + math.log(abs_s + 2 * j - 2)
            lt = (_log_abs_bernoulli_coeff(j) + log_poch
                  - (sigma + 2 * j - 1) * lx + log_q)
            max_term = max(max_term, lt)
            denom = sigma + 2 * j - 1
            backlund = math.log((abs_s + 2 * j - 1) / denom) if denom > 0.5 else math.log(2 * (abs_s + 2 * j))
            if lt + backlund < log_tol:
                best = _Plan(N, j - 1, lt + backlund, max_term)
                break
            if lt > prev and j > 3:
                break
            prev = lt
        if best is not None:
            return best
        N = N + 1 if N < 8 else int(N * 1.25) + 1
        if N > 10**6:
            raise AccuracyLoss("Euler-Maclaurin plan did not converge")


# ---------------------------------------------------------------------------
# helpers for the leading remainder term (X^{1-s} - 1)/(s - 1)
# ---------------------------------------------------------------------------

def _h_series_mp(u, terms):
    """h(u) = expm1(u)/u and h'(u) by Taylor series."""
    h = mpmath.mpf(0)
    hp = mpmath.mpf(0)
    upow = mpmath.mpf(1)
    fact = mpmath.mpf(1)  # (k+1)!
    for k in range(terms):
        fact *= (k + 1)
        h += upow / fact
        if k + 1 < terms:
            hp += (k + 1) * upow / (fact * (k + 2))
        upow *= u
    return h, hp


def _lead_nontrivial_mp(s, logX, Xpow1ms):
    """g(s) = (X^{1-s}-1)/(s-1) and g'(s), stable near s = 1."""
    u = (1 - s) * logX
    if abs(u) > 0.5:
        sm1 = s - 1
        g = (Xpow1ms - 1) / sm1
        gp = (-logX * Xpow1ms * sm1 - (Xpow1ms - 1)) / sm1 ** 2
        return g, gp
    terms = mpmath.mp.dps + 10
    h, hp = _h_series_mp(u, terms)
    return -logX * h, logX ** 2 * hp


def _lead_nontrivial_np(s, logX, Xpow1ms):
    u = (1 - s)[:, None] * logX[None, :]
    sm1 = (s - 1)[:, None]
    big = np.abs(u) > 0.5
    g = np.empty_like(u)
    gp = np.empty_like(u)
    with np.errstate(divide="ignore", invalid="ignore"):
        g_big = (Xpow1ms - 1) / sm1
        gp_big = (-logX[None, :] * Xpow1ms * sm1 - (Xpow1ms - 1)) / sm1 ** 2
    h = np.zeros_like(u)
    hp = np.zeros_like(u)
    upow = np.ones_like(u)
    fact = 1.0
    for k in range(24):
        fact *= (k + 1)
        h += upow / fact
        hp += (k + 1) * upow / (fact * (k + 2))
        upow = upow * u
    g_small = -logX[None, :] * h
    gp_small = logX[None, :] ** 2 * hp
    g[:] = np.where(big, g_big, g_small)
    gp[:] = np.where(big, gp_big, gp_small)
    return g, gp


# ---------------------------------------------------------------------------
# mpmath backend
# ---------------------------------------------------------------------------

@lru_cache(maxsize=64)
def _spf_table(n: int) -> tuple:
    """Smallest prime factor of 0..n (as a tuple for caching)."""
    spf = list(range(n + 1))
    for p in range(2, math.isqrt(n) + 1):
        if spf[p] == p:
            for m in range(p * p, n + 1, p):
                if spf[m] == m:
                    spf[m] = p
    return tuple(spf)


@lru_cache(maxsize=32)
def _bernoulli_coeffs(J: int, dps: int) -> tuple:
    with mpmath.workdps(dps):
        return tuple(mpmath.bernoulli(2 * j) / mpmath.factorial(2 * j) for j in range(1, J + 1))


@lru_cache(maxsize=256)
def _logs(n: int, dps: int) -> tuple:
    with mpmath.workdps(dps):
        return tuple([mpmath.mpf(0)] + [mpmath.log(m) for m in range(1, n + 1)])


def _series_mp(s, values: tuple, q: int, mode: str, digits: int,
               em_order: int | None, derivative: bool, offsets=None):
    """Core mp evaluator.

    ``mode`` is one of ``"L"`` (nontrivial character, pole-free form),
    ``"zeta"`` (keeps the pole) or ``"zeta_sm1"`` (returns (s-1) zeta(s)).
    ``offsets`` switches to a single Hurwitz zeta(s, a): values=(1,), q=1.
    Returns (value, derivative or None, error estimate).
    """
    s = mpmath.mpc(s)
    sigma = float(s.real)
    abs_s = float(abs(s)) + 1.0
    x_off = 1.0 / q if offsets is None else float(offsets)
    plan = _plan(abs_s, sigma, q, x_off, digits + 2, em_order)
    if em_order is not None and plan.J >= em_order and plan.log_error > -digits * math.log(10):
        raise AccuracyLoss("em_order too small for requested precision")
    guard = max(0, int(plan.log_max_term / math.log(10))) + 10
    dps = digits + guard + int(math.log10(max(q * plan.N, 10))) + 2
    N, J = plan.N, plan.J
    with mpmath.workdps(dps):
        s = mpmath.mpc(s)
        logs = None
        head = mpmath.mpc(0)
        dhead = mpmath.mpc(0)
        if offsets is None:
            M = N * q
            logs = _logs(M, dps)
            spf = _spf_table(M)
            pw = [None] * (M + 1)
            pw[1] = mpmath.mpc(1)
            for m in range(2, M + 1):
                p = spf[m]
                if p == m:
                    pw[m] = mpmath.exp(-s * logs[m])
                else:
                    pw[m] = pw[p] * pw[m // p]
                c = values[(m - 1) % q]
                if c:
                    if c > 0:
                        head += pw[m]
                        if derivative:
                            dhead -= logs[m] * pw[m]
                    else:
                        head -= pw[m]
                        if derivative:
                            dhead += logs[m] * pw[m]
            head += values[0]  # m = 1
            xs = [(a, mpmath.mpf(N) + mpmath.mpf(a) / q) for a in range(1, q + 1) if values[a - 1]]
        else:
            a = mpmath.mpf(offsets)
            for n in range(N):
                x = n + a
                lx = mpmath.log(x)
                t = mpmath.exp(-s * lx)
                head += t
                if derivative:
                    dhead -= lx * t
            xs = [(1, N + a)]
        coeffs = _bernoulli_coeffs(J, dps)
        # scaled Bernoulli coefficients B_j = c_j P_j(s) N^{-2j}, P_j = s(s+1)...(s+2j-2)
        N2 = mpmath.mpf(N) ** 2
        Bj, dBj = [], []
        Pn = s / N2
        dPn = 1 / N2
        for j in range(1, J + 1):
            if j > 1:
                f1 = s + (2 * j - 3)
                f2 = s + (2 * j - 2)
                dPn = (dPn * f1 * f2 + Pn * (f1 + f2)) / N2
                Pn = Pn * f1 * f2 / N2
            Bj.append(coeffs[j - 1] * Pn)
            dBj.append(coeffs[j - 1] * dPn)
        tail = mpmath.mpc(0)
        dtail = mpmath.mpc(0)
        lead_sum = mpmath.mpc(0)
        dlead_sum = mpmath.mpc(0)
        for a, X in xs:
            c = values[a - 1]
            lX = mpmath.log(X)
            Xs = mpmath.exp(-s * lX)  # X^{-s}
            X1ms = X * Xs
            if mode == "L":
                g, gp = _lead_nontrivial_mp(s, lX, X1ms)
                lead_sum += c * g
                dlead_sum += c * gp
            else:
                lead_sum += c * X1ms  # divided by (s-1) below
                dlead_sum += -c * lX * X1ms
            r = N2 / (X * X)
            acc = mpmath.mpc(0)
            dacc = mpmath.mpc(0)
            for j in range(J - 1, -1, -1):
                acc = acc * r + Bj[j]
                if derivative:
                    dacc = dacc * r + dBj[j]
            inner = X * r * acc
            part = Xs * (mpmath.mpf(1) / 2 + inner)
            tail += c * part
            if derivative:
                dtail += c * (-lX * part + Xs * X * r * dacc)
        err = math.exp(plan.log_error)
        if offsets is not None or q == 1:
            qs = mpmath.mpf(1)
            lq = mpmath.mpf(0)
        else:
            lq = mpmath.log(q)
            qs = mpmath.exp(-s * lq)
        if mode == "L":
            val = head + qs * (lead_sum + tail)
            dval = dhead + qs * (dlead_sum + dtail - lq * (lead_sum + tail)) if derivative else None
        elif mode == "zeta":
            if s == 1:
                raise PoleAtOne("zeta has a pole at s = 1")
            sm1 = s - 1
            val = head + tail + lead_sum / sm1
            dval = (dhead + dtail + dlead_sum / sm1 - lead_sum / sm1 ** 2) if derivative else None
        elif mode == "zeta_sm1":
            sm1 = s - 1
            reg = head + tail
            val = sm1 * reg + lead_sum
            dval = (reg + sm1 * (dhead + dtail) + dlead_sum) if derivative else None
            err *= float(abs(sm1)) + 1
        else:
            raise ValueError(mode)
    return val, dval, err


# ---------------------------------------------------------------------------
# numpy backend (float64, vectorised over s)
# ---------------------------------------------------------------------------

@lru_cache(maxsize=256)
def _np_head_data(values: tuple, q: int, M: int):
    m = np.arange(1, M + 1)
    c = np.asarray(values, dtype=float)[(m - 1) % q]
    keep = c != 0
    return np.log(m[keep].astype(float)), c[keep]


def _series_np(s: np.ndarray, values: tuple, q: int, mode: str, derivative: bool = True):
    s = np.atleast_1d(np.asarray(s, dtype=complex))
    out_f = np.empty(s.shape, dtype=complex)
    out_fp = np.empty(s.shape, dtype=complex)
    if s.size == 0:
        return out_f, out_fp
    # group by height so that low points do not pay for high ones
    order = np.argsort(np.abs(s))
    chunk = 128
    for start in range(0, s.size, chunk):
        idx = order[start:start + chunk]
        with np.errstate(divide="ignore", invalid="ignore"):
            f, fp = _series_np_block(s[idx], values, q, mode, derivative)
        out_f[idx] = f
        out_fp[idx] = fp
    return out_f, out_fp


def _series_np_block(s, values, q, mode, derivative):
    abs_s = float(np.max(np.abs(s))) + 1.0
    sigma = float(np.min(s.real))
    plan = _plan(abs_s, sigma, q, 1.0 / q, 15, None)
    # float64 cannot absorb cancellation among Bernoulli terms much larger
    # than the value itself; left of the line the value grows like
    # (q|s|/2pi)^(1/2 - sigma), which is allowed for
    size = max(0.0, 0.5 - sigma) * math.log(max(q * abs_s / _TWO_PI, 1.0))
    while plan.log_max_term - size > math.log(1e2):
        plan = _replan_fixed_N(abs_s, sigma, q, int(plan.N * 1.5) + 1)
    N, J = plan.N, plan.J
    logm, cm = _np_head_data(tuple(values), q, N * q)
    E = np.exp(-np.outer(s, logm))
    head = E @ cm
    dhead = E @ (-logm * cm) if derivative else None
    a = np.arange(1, q + 1)
    ca = np.asarray(values, dtype=float)
    keep = ca != 0
    X = N + a[keep] / q
    ca = ca[keep]
    lX = np.log(X)
    Xs = np.exp(-np.outer(s, lX))
    X1ms = Xs * X[None, :]
    if mode == "L":
        g, gp = _lead_nontrivial_np(s, lX, X1ms)
    else:
        g, gp = X1ms, -lX[None, :] * X1ms
    N2 = float(N) ** 2
    Bj = np.empty((J, s.size), dtype=complex)
    dBj = np.empty((J, s.size), dtype=complex)
    Pn = s / N2
    dPn = np.full_like(s, 1 / N2)
    for j in range(1, J + 1):
        if j > 1:
            f1 = s + (2 * j - 3)
            f2 = s + (2 * j - 2)
            dPn = (dPn * f1 * f2 + Pn * (f1 + f2)) / N2
            Pn = Pn * f1 * f2 / N2
        cj = _bernoulli_float(j)
        Bj[j - 1] = cj * Pn
        dBj[j - 1] = cj * dPn
    r = (N2 / (X * X))[None, :]
    acc = np.zeros((s.size, X.size), dtype=complex)
    dacc = np.zeros_like(acc)
    for j in range(J - 1, -1, -1):
        acc = acc * r + Bj[j][:, None]
        if derivative:
            dacc = dacc * r + dBj[j][:, None]
    part = Xs * (0.5 + X[None, :] * r * acc)
    dpart = -lX[None, :] * part + Xs * X[None, :] * r * dacc
    lead = g @ ca
    dlead = gp @ ca
    tail = part @ ca
    dtail = dpart @ ca if derivative else 0
    if q > 1:
        lq = math.log(q)
        qs = np.exp(-s * lq)
    else:
        lq = 0.0
        qs = np.ones_like(s)
    if mode == "L":
        f = head + qs * (lead + tail)
        fp = dhead + qs * (dlead + dtail - lq * (lead + tail)) if derivative else None
    elif mode == "zeta":
        sm1 = s - 1
        f = head + tail + lead / sm1
        fp = dhead + dtail + dlead / sm1 - lead / sm1 ** 2 if derivative else None
    else:
        sm1 = s - 1
        reg = head + tail
        f = sm1 * reg + lead
        fp = reg + sm1 * (dhead + dtail) + dlead if derivative else None
    return f, fp


def _replan_fixed_N(abs_s, sigma, q, N):
    """Plan with a prescribed N (used when float64 needs a longer head)."""
    lx = math.log(N + 1.0 / q)
    log_tol = -15 * math.log(10.0)
    log_q = (1.0 - sigma) * math.log(q) if q > 1 else 0.0
    log_poch = math.log(abs_s)
    max_term = -math.inf
    for j in range(1, 400):
        if j > 1:
            log_poch += math.log(abs_s + 2 * j - 3) + math.log(abs_s + 2 * j - 2)
        lt = _log_abs_bernoulli_coeff(j) + log_poch - (sigma + 2 * j - 1) * lx + log_q
        max_term = max(max_term, lt)
        if lt + math.log(2 * (abs_s + 2 * j)) < log_tol:
            return _Plan(N, j - 1, lt, max_term)
    raise AccuracyLoss("float64 plan did not converge")


@lru_cache(maxsize=None)
def _bernoulli_float(j: int) -> float:
    return float(mpmath.bernoulli(2 * j) / mpmath.factorial(2 * j))


# ---------------------------------------------------------------------------
# public evaluators
# ---------------------------------------------------------------------------

def _check(err: float, ctx: EvaluationContext):
    if not err <= ctx.error_ceiling:
        raise AccuracyLoss(f"a-posteriori error {err:.3g} exceeds {ctx.error_ceiling:.3g}")


def hurwitz_zeta(s, a, ctx: EvaluationContext = DEFAULT_CONTEXT):
    """zeta(s, a) for 0 < a <= 1 by Euler-Maclaurin."""
    s = mpmath.mpc(s)
    if s == 1:
        raise PoleAtOne("Hurwitz zeta has a pole at s = 1")
    a = mpmath.mpf(a)
    if not 0 < a <= 1:
        raise ValueError("a must lie in (0, 1]")
    val, _, err = _series_mp(s, (1,), 1, "zeta", ctx.precision_digits, ctx.em_order,
                             False, offsets=a)
    _check(err, ctx)
    return val


def evaluate_l(s, chi: RealPrimitiveCharacter | None,
               ctx: EvaluationContext = DEFAULT_CONTEXT,
               derivative: bool = False, remove_pole: bool = False) -> LValue:
    """L(s, chi) (or zeta when ``chi`` is None) with optional derivative.

    With ``remove_pole`` the zeta case returns (s-1) zeta(s) instead.
    """
    if chi is None:
        mode = "zeta_sm1" if remove_pole else "zeta"
        if mode == "zeta" and mpmath.mpc(s) == 1:
            raise PoleAtOne("zeta has a pole at s = 1")
        val, dval, err = _series_mp(s, (1,), 1, mode, ctx.precision_digits,
                                    ctx.em_order, derivative)
    else:
        val, dval, err = _series_mp(s, tuple(chi.values()), chi.q, "L",
                                    ctx.precision_digits, ctx.em_order, derivative)
    _check(err, ctx)
    return LValue(val, dval, err)


def zeta(s, ctx: EvaluationContext = DEFAULT_CONTEXT):
    return evaluate_l(s, None, ctx).value


def dirichlet_l(s, chi: RealPrimitiveCharacter, ctx: EvaluationContext = DEFAULT_CONTEXT):
    """L(s, chi) = q^{-s} sum_a chi(a) zeta(s, a/q)."""
    return evaluate_l(s, chi, ctx).value


def l_values_np(s, chi: RealPrimitiveCharacter | None, remove_pole: bool = True):
    """Vectorised float64 (value, derivative) arrays; zeta if chi is None."""
    if chi is None:
        return _series_np(s, (1,), 1, "zeta_sm1" if remove_pole else "zeta")
    return _series_np(s, tuple(chi.values()), chi.q, "L")


def completed_l(s, chi: RealPrimitiveCharacter, ctx: EvaluationContext = DEFAULT_CONTEXT):
    """Lambda(s, chi) = (q/pi)^{(s+a)/2} Gamma((s+a)/2) L(s, chi)."""
    L = dirichlet_l(s, chi, ctx)
    with mpmath.workdps(ctx.precision_digits + 10):
        w = (mpmath.mpc(s) + chi.a) / 2
        return (mpmath.mpf(chi.q) / mpmath.pi) ** w * mpmath.gamma(w) * L


@dataclass(frozen=True)
class CharacterPair:
    """Two distinct real primitive characters and the primitive psi of their product.

    Constructed with ``q2 <= q1``.
    """

    chi1: RealPrimitiveCharacter
    chi2: RealPrimitiveCharacter
    psi: RealPrimitiveCharacter

    @classmethod
    def from_discriminants(cls, d1: int, d2: int) -> "CharacterPair":
        c1, c2 = RealPrimitiveCharacter(d1), RealPrimitiveCharacter(d2)
        if c1.d == c2.d:
            raise EqualCharacters("characters must be distinct")
        if c2.q > c1.q:
            c1, c2 = c2, c1
        return cls(c1, c2, product_primitive(c1, c2))

    @property
    def q1(self) -> int:
        return self.chi1.q

    @property
    def q2(self) -> int:
        return self.chi2.q

    @property
    def q_psi(self) -> int:
        return self.psi.q

    @property
    def characters(self) -> tuple:
        return (self.chi1, self.chi2, self.psi)

    def factors(self) -> tuple:
        """(label, character or None for zeta) for the four factors of D."""
        return (("zeta", None),) + tuple((c.label(), c) for c in self.characters)

    def label(self) -> str:
        return f"D[{self.chi1.d},{self.chi2.d}]"


def d_function(s, pair: CharacterPair, ctx: EvaluationContext = DEFAULT_CONTEXT):
    """D(s) = zeta(s) L(s, chi1) L(s, chi2) L(s, psi)."""
    if mpmath.mpc(s) == 1:
        raise PoleAtOne("D has a simple pole at s = 1")
    val = zeta(s, ctx)
    for c in pair.characters:
        val *= dirichlet_l(s, c, ctx)
    return val


def d_function_times_pole(s, pair: CharacterPair, ctx: EvaluationContext = DEFAULT_CONTEXT):
    """(s - 1) D(s), entire."""
    val = evaluate_l(s, None, ctx, remove_pole=True).value
    for c in pair.characters:
        val *= dirichlet_l(s, c, ctx)
    return val


def neg_log_derivative_d(s, pair: CharacterPair, ctx: EvaluationContext = DEFAULT_CONTEXT,
                         without_pole: bool = False):
    """-D'/D(s); with ``without_pole`` the 1/(s-1) part is removed."""
    if not without_pole and mpmath.mpc(s) == 1:
        raise PoleAtOne("-D'/D has a pole at s = 1")
    z = evaluate_l(s, None, ctx, derivative=True, remove_pole=True)
    total = -z.derivative / z.value
    for c in pair.characters:
        v = evaluate_l(s, c, ctx, derivative=True)
        total -= v.derivative / v.value
    if not without_pole:
        total += 1 / (mpmath.mpc(s) - 1)
    return total


# ---------------------------------------------------------------------------
# Dirichlet coefficients of -D'/D
# ---------------------------------------------------------------------------

def _primes_up_to(n: int) -> np.ndarray:
    sieve = np.ones(n + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, math.isqrt(n) + 1):
        if sieve[p]:
            sieve[p * p::p] = False
    return np.flatnonzero(sieve)


@dataclass(frozen=True)
class CoefficientTable:
    """a_D(p^m) = (1 + chi1(p^m) + chi2(p^m) + psi(p^m)) log p for p^m <= N.

    ``n`` is sorted; integers that are not prime powers are absent (zero).
    """

    N: int
    n: np.ndarray
    values: np.ndarray

    def __getitem__(self, k: int) -> float:
        i = np.searchsorted(self.n, k)
        if i < self.n.size and self.n[i] == k:
            return float(self.values[i])
        return 0.0

    def as_dict(self) -> dict:
        return {int(k): float(v) for k, v in zip(self.n, self.values)}


def _chi_at(chi: RealPrimitiveCharacter, n: np.ndarray) -> np.ndarray:
    return chi.values_array[(n - 1) % chi.q]


def a_D_table(pair: CharacterPair, N: int) -> CoefficientTable:
    """Nonnegative Dirichlet coefficients of -D'/D at prime powers up to N."""
    if N < 2:
        raise ValueError("N must be at least 2")
    primes = _primes_up_to(N)
    ns, vals = [], []
    p = primes.astype(np.int64)
    logp = np.log(p.astype(float))
    cp = [_chi_at(c, p) for c in pair.characters]
    pk = p.copy()
    power = 1
    alive = np.ones(p.size, dtype=bool)
    while alive.any():
        idx = np.flatnonzero(alive)
        weight = 1.0 + sum(c[idx] ** power for c in cp)
        ns.append(pk[idx])
        vals.append(weight * logp[idx])
        power += 1
        with np.errstate(over="ignore"):
            nxt = pk[idx] * p[idx]
        ok = (nxt <= N) & (nxt > 0)
        alive[:] = False
        alive[idx[ok]] = True
        pk[idx[ok]] = nxt[ok]
    n = np.concatenate(ns)
    v = np.concatenate(vals).astype(float)
    order = np.argsort(n)
    return CoefficientTable(N, n[order], v[order])


class DirichletSide(NamedTuple):
    value: float
    tail_bound: float
    N: int


def dirichlet_tail_bound(sigma: float, order: int, N: int) -> float:
    """Upper bound for (1/order!) sum_{n>N} a_D(n) (log n)^order n^{-sigma}.

    Uses a_D(n) <= 4 Lambda(n) and psi(x) <= 1.03883 x.  For decreasing
    f(x) = (log x)^r x^{-sigma}, partial summation gives
    sum_{n>N} Lambda(n) f(n) <= c (N f(N) + int_N^inf f),
    and the integral is Gamma(r+1, (sigma-1) log N) / (sigma-1)^{r+1}.
    """
    if sigma <= 1:
        return math.inf
    r = order
    if math.log(N) * sigma <= r:
        raise ValueError("N too small for the monotone tail estimate")
    with mpmath.workdps(30):
        lN = mpmath.log(N)
        fN = lN ** r * mpmath.mpf(N) ** (-sigma)
        integral = mpmath.gammainc(r + 1, (sigma - 1) * lN) / mpmath.mpf(sigma - 1) ** (r + 1)
        bound = 4 * CHEBYSHEV_PSI_CONSTANT * (N * fN + integral) / mpmath.factorial(r)
        return float(bound)


def dirichlet_side_derivative(sigma: float, order: int, pair: CharacterPair, N: int,
                              ctx: EvaluationContext = DEFAULT_CONTEXT,
                              accuracy: float | None = None,
                              table: CoefficientTable | None = None) -> DirichletSide:
    """Truncated (1/order!) sum_{n<=N} a_D(n) (log n)^order n^{-sigma} and its tail bound.

    Every coefficient is nonnegative, so the true value lies in
    ``[value, value + tail_bound]``.
    """
    if sigma <= 1:
        raise ValueError("sigma must exceed 1")
    if order < 0:
        raise ValueError("order must be nonnegative")
    tab = table if table is not None and table.N >= N else a_D_table(pair, N)
    keep = tab.n <= N
    n = tab.n[keep].astype(float)
    a = tab.values[keep]
    ln = np.log(n)
    terms = a * ln ** order * np.exp(-sigma * ln) / math.factorial(order)
    value = math.fsum(terms.tolist())
    tail = dirichlet_tail_bound(sigma, order, N)
    if accuracy is not None and tail > accuracy:
        raise TailTooLarge(f"tail bound {tail:.3g} exceeds requested accuracy {accuracy:.3g}")
    return DirichletSide(value, tail, N)


class TaylorCoefficient(NamedTuple):
    value: object
    error: float
    radius: float
    points: int


def log_derivative_taylor_coefficient(s, order: int, pair: CharacterPair, delta: float,
                                      ctx: EvaluationContext = DEFAULT_CONTEXT,
                                      points: int = 48) -> TaylorCoefficient:
    """Taylor coefficient of order ``order`` at real s > 1 of -D'/D minus its pole.

    Computed by the trapezoid rule on a Cauchy circle of radius
    min(delta/4, s-1)/2 (or ``ctx.derivative_step``); the error estimate is the
    change when the number of nodes is halved.  Adding (-1)^order/(s-1)^(order+1)
    gives the coefficient of -D'/D itself.
    """
    s = mpmath.mpf(s)
    rho = ctx.derivative_step or min(delta / 4, float(s - 1)) / 2
    lost = int(order * math.log10(1 / rho)) + 5
    inner = EvaluationContext(ctx.precision_digits + lost, ctx.em_order)
    with mpmath.workdps(inner.precision_digits + 5):
        vals = []
        for k in range(points):
            z = s + rho * mpmath.expjpi(mpmath.mpf(2 * k) / points)
            vals.append(neg_log_derivative_d(z, pair, inner, without_pole=True))

        def coeff(step):
            m = points // step
            acc = mpmath.mpc(0)
            for k in range(0, points, step):
                acc += vals[k] * mpmath.expjpi(-mpmath.mpf(2 * order * k) / points)
            return acc / (m * mpmath.mpf(rho) ** order)

        full = coeff(1)
        half = coeff(2)
        err = float(abs(full - half))
        return TaylorCoefficient(full.real, err, rho, points)
