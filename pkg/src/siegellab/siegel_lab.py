"""Quantitative skeleton of the repulsion argument for exceptional zeros.

Four pieces live here:

* the derivative identity for -D'/D at s = 1 + eta (Dirichlet side versus
  zero side) and the positivity inequality that follows from it;
* the Guinand-Weil explicit formula for D(s) with the Fejer kernel, with
  the archimedean terms computed exactly;
* the ledger of constants as functions of (delta, eps);
* the contradiction chain, evaluated on injected (hypothetical) values of
  beta1, beta2 and log log q1.

No real character at desk scale has a real zero near 1, so beta1, beta2
and the conductor size are injectable, while zero inventories are real.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path

import mpmath
import numpy as np

from .errors import (ParameterOutOfRange, PreconditionFailed, TailTooLarge,
                     UncertifiedInventory)
from .lfunc import (DEFAULT_CONTEXT, DOUBLE_CONTEXT, CharacterPair,
                    EvaluationContext, a_D_table, dirichlet_side_derivative,
                    log_derivative_taylor_coefficient)
from .zeros import (TrivialZeroSpec, ZeroInventory, cached_scan,
                    scan_inventory, trivial_zero_tail, window_power_sum)

E = math.e


# ---------------------------------------------------------------------------
# pair context
# ---------------------------------------------------------------------------

@dataclass
class PairContext:
    """A character pair with (delta, eps, eta) and zero inventories of D.

    eta = delta/e + beta2 - 1.  ``beta2`` may be None when eta is given
    directly and equals delta/e (the boundary case beta2 = 1).
    """

    pair: CharacterPair
    delta: float
    eps: float
    eta: float
    beta1: float | None = None
    beta2: float | None = None
    T: float = 0.0
    inventory: ZeroInventory | None = None
    parts: dict = field(default_factory=dict)

    @classmethod
    def build(cls, d1: int, d2: int, delta: float = 0.1, eps: float = 0.5,
              eta: float | None = None, beta1: float | None = None,
              beta2: float | None = None, T: float = 0.0,
              scan_ctx: EvaluationContext = DOUBLE_CONTEXT,
              cache_dir: str | Path | None = None) -> "PairContext":
        if not 0 < delta <= 0.1:
            raise ParameterOutOfRange("delta must lie in (0, 1/10]")
        pair = CharacterPair.from_discriminants(d1, d2)
        if eta is None and beta2 is None:
            eta = delta / E
        elif eta is None:
            eta = delta / E + beta2 - 1
        elif beta2 is None:
            b2 = 1 - delta / E + eta
            beta2 = b2 if b2 < 1 else None
        elif abs(eta - (delta / E + beta2 - 1)) > 1e-15:
            raise ParameterOutOfRange("eta must equal delta/e + beta2 - 1")
        if eta <= 0:
            raise ParameterOutOfRange("eta must be positive")
        ctx = cls(pair, delta, eps, eta, beta1, beta2)
        if T > 0:
            ctx.load_zeros(T, scan_ctx, cache_dir)
        return ctx

    def load_zeros(self, T: float, scan_ctx: EvaluationContext = DOUBLE_CONTEXT,
                   cache_dir: str | Path | None = None):
        parts = {}
        for label, c in self.pair.factors():
            if cache_dir is not None:
                parts[label] = cached_scan(c, T, scan_ctx, Path(cache_dir),
                                           d_or_pair=None if c is None else c.d)
            else:
                parts[label] = scan_inventory(c, T, scan_ctx)
        self.parts = parts
        self.inventory = ZeroInventory.union(self.pair.label(), parts.values())
        self.T = self.inventory.T_certified
        return self

    @property
    def Q(self) -> int:
        return self.pair.q1 * self.pair.q2 * self.pair.q_psi

    def require_inventory(self, T: float) -> ZeroInventory:
        inv = self.inventory
        if inv is None or not inv.certified or inv.T_certified < T:
            raise UncertifiedInventory(f"no certified inventory of {self.pair.label()} to height {T}")
        return inv.truncated(T) if inv.T_certified > T else inv


# ---------------------------------------------------------------------------
# sums over zeros
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ZeroSum:
    """Re sum over all zeros w of D of (s - w)^(-kl), split by origin."""

    nontrivial: float      # listed zeros with |gamma| <= T (conjugates included)
    trivial: float         # negative trivial zeros down to -M
    at_zero: float         # ord_{s=0} D * s^(-kl)
    tail_estimate: float   # zeros above T, centre of the enclosure
    tail_halfwidth: float  # radius of that enclosure
    trivial_bound: float   # trivial zeros below -M
    refinement_bound: float

    @property
    def total(self) -> float:
        return math.fsum([self.nontrivial, self.trivial, self.at_zero, self.tail_estimate])

    @property
    def allowance(self) -> float:
        return self.tail_halfwidth + self.trivial_bound + self.refinement_bound


def zero_power_sum(pctx: PairContext, s: float, kl: int, T: float, M: int = 10**4) -> ZeroSum:
    """All terms of Re sum_w (s - w)^(-kl) with explicit truncation bounds.

    For |gamma| > T, (s - w)^(-kl) = (-i gamma)^(-kl) (1 + u)^(-kl) with
    |u| <= s/|gamma|, so each conjugate pair contributes
    2 cos(kl pi/2) |gamma|^(-kl) up to 2 kl s |gamma|^(-kl-1)/(1 - s/T)^(kl+1);
    the sums of |gamma|^(-e) are enclosed with the zero-count window.
    """
    if s <= 1:
        raise ParameterOutOfRange("s must exceed 1")
    inv = pctx.require_inventory(T)
    with mpmath.workdps(30):
        sm = mpmath.mpf(s)
        terms = []
        refine = 0.0
        for z in inv.zeros:
            w = z.location
            v = (sm - w) ** (-kl)
            weight = 2 if z.kind == "complex_pair" else 1
            terms.append(weight * v.real)
            refine += weight * kl * float(abs(sm - w)) ** (-kl - 1) * z.error_radius
        nontrivial = float(mpmath.fsum(terms))
    spec = TrivialZeroSpec.for_pair(pctx.pair)
    triv, triv_bound = trivial_zero_tail(spec, s, kl, M)
    at_zero = spec.ord_at_zero * s ** (-kl)
    counted = inv.count_up_to(T)
    lo, hi = window_power_sum(T, kl, pctx.Q, counted)
    lo1, hi1 = window_power_sum(T, kl + 1, pctx.Q, counted)
    c = round(math.cos(kl * math.pi / 2))
    correction = kl * s * hi1 / (1 - s / T) ** (kl + 1)
    centre = c * 0.5 * (lo + hi)
    half = abs(c) * 0.5 * (hi - lo) + correction
    return ZeroSum(nontrivial, float(triv), at_zero, centre, half, triv_bound, refine)


# ---------------------------------------------------------------------------
# derivative identity and inequality
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class IdentityReport:
    pair: str
    s: float
    kl: int
    T: float
    N: int
    M: int
    lhs: float
    lhs_error: float
    series_value: float
    series_tail_bound: float
    series_consistent: bool
    pole_term: float
    zero_sum: float
    rhs: float
    discrepancy: float
    budget: float
    budget_parts: dict

    @property
    def verdict(self) -> bool:
        return self.discrepancy <= self.budget

    def to_dict(self) -> dict:
        d = asdict(self)
        d["verdict"] = self.verdict
        return d


def verify_hadamard_derivative_identity(pctx: PairContext, kl: int, s: float | None = None,
                                        T: float | None = None, N: int = 10**6,
                                        M: int = 10**4,
                                        ctx: EvaluationContext = DEFAULT_CONTEXT) -> IdentityReport:
    """Compare (1/r!) Re sum a_D(n) (log n)^r n^(-s), r = kl - 1, with
    Re(1/(s-1)^kl - sum_w (s - w)^(-kl)).

    The left side is taken from the Taylor coefficient of -D'/D at s (a
    Cauchy integral on a small circle); the truncated Dirichlet series with
    its rigorous tail bound must enclose it, which is reported as
    ``series_consistent``.
    """
    if kl < 2:
        raise ParameterOutOfRange("kl must be at least 2")
    s = 1 + pctx.eta if s is None else float(s)
    if s <= 1:
        raise ParameterOutOfRange("s must exceed 1")
    T = pctx.T if T is None else T
    r = kl - 1
    coeff = log_derivative_taylor_coefficient(s, r, pctx.pair, pctx.delta, ctx)
    with mpmath.workdps(ctx.precision_digits + 5):
        pole = mpmath.mpf(s - 1) ** (-kl)
        # the pole term is common to both sides; compare what remains
        reduced = (-1) ** r * coeff.value
        lhs_f = float(reduced + pole)
        pole_f = float(pole)
    lhs_err = coeff.error + abs(float(reduced)) * 10.0 ** (-ctx.precision_digits + 2)
    series = dirichlet_side_derivative(s, r, pctx.pair, N, ctx)
    slack = lhs_err + 1e-15 * abs(lhs_f)
    consistent = (series.value <= lhs_f + slack
                  and lhs_f - slack <= series.value + series.tail_bound)
    zs = zero_power_sum(pctx, s, kl, T, M)
    rhs = pole_f - zs.total
    discrepancy = abs(float(reduced) + zs.total)
    parts = {"lhs_quadrature": lhs_err, "zero_tail": zs.tail_halfwidth,
             "trivial_tail": zs.trivial_bound, "zero_refinement": zs.refinement_bound,
             "rounding": 1e-14 * (abs(zs.nontrivial) + abs(zs.trivial) + zs.at_zero + 1.0)}
    budget = math.fsum(parts.values())
    return IdentityReport(pctx.pair.label(), s, kl, T, N, M, lhs_f, lhs_err, series.value,
                          series.tail_bound, consistent, pole_f, zs.total, rhs,
                          discrepancy, budget, parts)


@dataclass(frozen=True)
class InequalityReport:
    kl: int
    eta: float
    lhs_pole: float
    zero_sum: float
    allowance: float
    margin_factor: float

    @property
    def holds(self) -> bool:
        return self.zero_sum + self.allowance < self.lhs_pole

    def to_dict(self) -> dict:
        d = asdict(self)
        d["holds"] = self.holds
        return d


def verify_lemma1_inequality(pctx: PairContext, kl: int, T: float | None = None,
                             M: int = 10**4) -> InequalityReport:
    """Re sum_w (1 + eta - w)^(-kl) < eta^(-kl) on the actual zeros of D.

    ``margin_factor`` is eta^(-kl) / (|zero sum| + allowance).
    """
    if kl < 2:
        raise ParameterOutOfRange("kl must be at least 2")
    T = pctx.T if T is None else T
    eta = pctx.eta
    zs = zero_power_sum(pctx, 1 + eta, kl, T, M)
    pole = eta ** (-kl)
    denom = abs(zs.total) + zs.allowance
    margin = pole / denom if denom > 0 else math.inf
    return InequalityReport(kl, eta, pole, zs.total, zs.allowance, margin)


# ---------------------------------------------------------------------------
# explicit formula with the Fejer kernel
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FejerTestFunction:
    """phi(x) = (sin(2 pi x)/(2 pi x))^2 and its transform, scale B."""

    B: float

    def __post_init__(self):
        if not self.B > 0:
            raise ParameterOutOfRange("B must be positive")

    @staticmethod
    def phi(x):
        x = mpmath.mpmathify(x)
        if x == 0:
            return mpmath.mpf(1)
        y = 2 * mpmath.pi * x
        return (mpmath.sin(y) / y) ** 2

    @staticmethod
    def phi_hat(y):
        y = abs(y)
        return 0.5 * (1 - y / 2) if y <= 2 else 0.0

    def g(self, x):
        """(1/B) phi_hat(x/B): the transform pair of h(r) = phi(B r / 2 pi)."""
        return self.phi_hat(x / self.B) / self.B

    def at_zero(self, rho):
        """phi((B/2 pi i)(rho - 1/2))."""
        return self.phi(self.B * (mpmath.mpc(rho) - 0.5) / (2j * mpmath.pi))

    def pole_value(self):
        """phi(B/(4 pi i)) = (sinh(B/2)/(B/2))^2, real and positive."""
        return (mpmath.sinh(self.B / 2) / (self.B / 2)) ** 2


@dataclass(frozen=True)
class WeilReport:
    pair: str
    B: float
    T: float
    zero_side: float
    prime_side: float
    prime_terms: int
    prime_terms_nonnegative: bool
    archimedean_side: float
    archimedean_terms: dict
    o1_value: float
    pole_terms: float
    doubled_pole_terms: float
    discrepancy: float
    discrepancy_doubled_pole: float
    budget: float
    budget_parts: dict

    @property
    def verdict(self) -> bool:
        return self.discrepancy <= self.budget

    def to_dict(self) -> dict:
        d = asdict(self)
        d["verdict"] = self.verdict
        return d


def _archimedean_integral(test: FejerTestFunction, a: int, dps: int = 30):
    """int_0^inf [g(0) e^{-2x}/x - 2 g(x) e^{-(1/2 + a) x}/(1 - e^{-2x})] dx.

    This is (1/2 pi) int h(r) Re psi((1/2 + a + i r)/2) dr.  g vanishes past
    2B, leaving g(0) E1(4B) for the rest of the first term.
    """
    B = test.B
    with mpmath.workdps(dps + 10):
        g0 = mpmath.mpf(test.g(0))
        c = mpmath.mpf(0.5) + a

        def f(x):
            gx = (1 - x / (2 * B)) / (2 * B)
            return g0 * mpmath.exp(-2 * x) / x - 2 * gx * mpmath.exp(-c * x) / (-mpmath.expm1(-2 * x))

        val, err = mpmath.quad(f, [0, B, 2 * B], error=True)
        val += g0 * mpmath.e1(4 * B)
        return val, float(err)


def explicit_formula_check(pctx: PairContext, B: float = 2.0, prime_cutoff: int | None = None,
                           zero_height: float | None = None, dps: int = 30) -> WeilReport:
    """Evaluate both sides of the explicit formula for D(s).

    zero side + (2/B) sum a_D(n) n^(-1/2) phi_hat(log n / B)
      = sum_i [log(q_i/pi)/(2B) + A_i] + phi(B/4 pi i) + phi(-B/4 pi i)
    with q = 1 for zeta and A_i the digamma integrals of the four Gamma
    factors.  The zero side is truncated at ``zero_height``; the rest is
    bounded by cosh(B/2)^2/(B gamma)^2 summed with the count window.
    """
    test = FejerTestFunction(B)
    T = pctx.T if zero_height is None else zero_height
    inv = pctx.require_inventory(T)
    support = math.exp(2 * B)
    if prime_cutoff is None:
        prime_cutoff = int(math.floor(support))
    if prime_cutoff < math.floor(support):
        raise TailTooLarge(f"prime_cutoff must reach e^(2B) = {support:.6g}")
    with mpmath.workdps(dps + 5):
        zs = []
        refine = 0.0
        for z in inv.zeros:
            v = test.at_zero(z.location)
            weight = 2 if z.kind == "complex_pair" else 1
            zs.append(weight * v.real)
            # |d phi/dx| < 6 on the real line, dx/drho = B/(2 pi)
            refine += weight * 6 * B / (2 * math.pi) * z.error_radius
        zero_side = float(mpmath.fsum(zs))
        tab = a_D_table(pctx.pair, max(prime_cutoff, 2))
        terms = []
        for n, a in zip(tab.n.tolist(), tab.values.tolist()):
            if n > support:
                break
            ph = test.phi_hat(math.log(n) / B)
            terms.append(2 / B * a / math.sqrt(n) * ph)
        prime_side = math.fsum(terms)
        nonneg = all(t >= 0 for t in terms)
        arch = {}
        quad_err = 0.0
        conductor_sum = 0.0
        for label, c in pctx.pair.factors():
            q = 1 if c is None else c.q
            a = 0 if c is None else c.a
            A, err = _archimedean_integral(test, a, dps)
            quad_err += err
            arch[label] = float(mpmath.log(mpmath.mpf(q) / mpmath.pi) / (2 * B) + A)
            conductor_sum += math.log(q)
        arch_side = math.fsum(arch.values())
        pole = float(2 * test.pole_value())
    discrepancy = abs(zero_side + prime_side - arch_side - pole)
    discrepancy2 = abs(zero_side + prime_side - arch_side - 2 * pole)
    counted = inv.count_up_to(T)
    _, s2 = window_power_sum(T, 2, pctx.Q, counted)
    tail = math.cosh(B / 2) ** 2 / B ** 2 * s2
    parts = {"zero_tail": tail, "zero_refinement": refine, "quadrature": quad_err,
             "rounding": 1e-12 * (abs(zero_side) + prime_side + abs(arch_side) + pole)}
    budget = math.fsum(parts.values())
    # what an O(1) in (log(q_psi q1 q2) + O(1))/(2B) has to absorb
    o1 = 2 * B * arch_side - conductor_sum
    return WeilReport(pctx.pair.label(), B, T, zero_side, prime_side, len(terms), nonneg,
                      arch_side, arch, o1, pole, 2 * pole, discrepancy, discrepancy2,
                      budget, parts)


# ---------------------------------------------------------------------------
# constants
# ---------------------------------------------------------------------------

def _check_delta_eps(delta, eps):
    if not 0 < delta <= 0.1:
        raise ParameterOutOfRange("delta must lie in (0, 1/10]")
    if not 0 < eps <= 1:
        raise ParameterOutOfRange("eps must lie in (0, 1]")


@dataclass(frozen=True)
class ConstantLedger:
    delta: float
    eps: float
    loglog_q0: float
    loglog_q0_exact: str
    log_max_gap: float
    eta_window: tuple
    k_max: int
    turan_K_bound: int
    final_beta2_bound: float
    final_beta2_gap: str

    def to_dict(self) -> dict:
        d = asdict(self)
        d["eta_window"] = list(self.eta_window)
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)


def constants_ledger(delta: float, eps: float) -> ConstantLedger:
    """Plug-in values of every constant of the argument for given (delta, eps).

    q0 is kept as log log q0 = 10000/(delta^3 eps^2), computed from the
    decimal inputs in exact rational arithmetic.
    """
    _check_delta_eps(delta, eps)
    d = Fraction(str(delta))
    e = Fraction(str(eps))
    llq0 = Fraction(10000) / (d ** 3 * e ** 2)
    with mpmath.workdps(40):
        gap = mpmath.mpf(delta) / mpmath.e * (-mpmath.expm1(-mpmath.mpf(eps) / 480))
        final = 1 - gap
        gap_s = mpmath.nstr(gap, 30)
        final_f = float(final)
    return ConstantLedger(
        delta=delta, eps=eps,
        loglog_q0=float(llq0), loglog_q0_exact=str(llq0),
        log_max_gap=float(-e * llq0),
        eta_window=(delta / (2 * E), delta / E),
        k_max=120, turan_K_bound=5,
        final_beta2_bound=final_f, final_beta2_gap=gap_s,
    )


# ---------------------------------------------------------------------------
# Bernoulli inequality
# ---------------------------------------------------------------------------

def bernoulli_check(a, b) -> bool:
    """ab > 1 - (1 - a)^b for 0 < a < 1, b > 1, decided in extended precision.

    ab - (1 - (1-a)^b) = sum_{k>=2} (-1)^k C(b, k) a^k.  When ab < 1/10 the
    ratio of consecutive terms is at most (b + k) a/(k + 1) < 1/5, so the
    sum has the sign of its leading term b(b-1)a^2/2 > 0; this settles gaps
    far below any working precision.  Otherwise the gap is about
    b(b-1)a^2/2 and the precision is raised until it is resolved.
    """
    a = mpmath.mpmathify(a)
    b = mpmath.mpmathify(b)
    if not (0 < a < 1 and b > 1):
        raise ParameterOutOfRange("need 0 < a < 1 and b > 1")
    with mpmath.workdps(30):
        if a * b < mpmath.mpf(1) / 10:
            lead = b * (b - 1) * a * a / 2
            return bool(lead > 0)
        scale = (b - 1) * a * a
        extra = int(-mpmath.log10(scale)) if scale < 1 else 0
    with mpmath.workdps(30 + max(extra, 0)):
        a = +a
        b = +b
        rhs = -mpmath.expm1(b * mpmath.log1p(-a))
        return bool(a * b > rhs)


# ---------------------------------------------------------------------------
# contradiction chain
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ChainStep:
    name: str
    statement: str
    verdict: bool        # step follows from the previous ones and its hypotheses
    direct: bool | None  # displayed inequality evaluated on the inputs
    lhs: str = ""
    rhs: str = ""


@dataclass(frozen=True)
class ChainReport:
    delta: float
    eps: float
    loglog_q1: float
    loglog_q2: float
    k: int
    eta: str
    a1: str
    a2: str
    b: str
    hypothesis_beta1: bool
    hypothesis_beta2: bool
    steps: tuple
    final_gap_lower: str
    contradiction: bool
    rewriting_direct: bool

    def to_dict(self) -> dict:
        d = asdict(self)
        d["steps"] = [asdict(s) for s in self.steps]
        return d


def _gap(beta, gap, name):
    if gap is not None:
        g = mpmath.mpmathify(gap)
    elif beta is not None:
        g = 1 - mpmath.mpmathify(beta)
    else:
        raise ParameterOutOfRange(f"{name} or its gap is required")
    if not 0 < g < 1:
        raise PreconditionFailed(f"0 < {name} < 1", f"1 - {name} = {mpmath.nstr(g, 8)}")
    return g


def contradiction_chain(delta: float, eps: float, loglog_q1, beta1=None, beta2=None,
                        k: int = 120, loglog_q2=None, gap1=None, gap2=None,
                        dps: int = 50) -> ChainReport:
    """Evaluate the chain from the rewritten power-sum inequality to the final
    bound on beta2, on injected inputs.

    beta_j may be given directly or through gap_j = 1 - beta_j (needed when
    the gap is far below double precision, e.g. (log q1)^(-eps) with
    log log q1 = 10^8).  Every step reports ``verdict`` (it follows from the
    earlier steps and its stated hypotheses) and ``direct`` (the displayed
    inequality is true for the inputs).  A contradiction is flagged when
    both lower bounds beta_j >= 1 - (log q_j)^(-eps) hold and the derived
    final bound is incompatible with the one for beta2.
    """
    _check_delta_eps(delta, eps)
    ledger = constants_ledger(delta, eps)
    with mpmath.workdps(dps):
        L1 = mpmath.mpmathify(loglog_q1)
        L2 = L1 if loglog_q2 is None else mpmath.mpmathify(loglog_q2)
        if not (ledger.loglog_q0 <= L2 <= L1):
            raise PreconditionFailed("q0 <= q2 <= q1",
                                     f"need {ledger.loglog_q0} <= loglog q2 <= loglog q1")
        if not (isinstance(k, int) and 1 <= k <= 120):
            raise PreconditionFailed("1 <= k <= 120", f"k = {k}")
        g1 = _gap(beta1, gap1, "beta1")
        g2 = _gap(beta2, gap2, "beta2")
        d = mpmath.mpf(delta)
        ep = mpmath.mpf(eps)
        de = d / mpmath.e
        eta = de - g2
        if eta <= 0:
            raise PreconditionFailed("eta > 0", "requires 1 - beta2 < delta/e")
        # inputs at the boundary beta_j = 1 - (log q_j)^(-eps) usually arrive
        # rounded to double precision, hence the relative slack
        slack = 1 + mpmath.mpf(10) ** -12
        hyp1 = g1 <= mpmath.exp(-ep * L1) * slack
        hyp2 = g2 <= mpmath.exp(-ep * L2) * slack
        a1 = g1 / (eta + g1)
        a2 = g2 / (eta + g2)
        b = 2 * k * L1
        log1m_a2 = mpmath.log1p(-a2)
        steps = []

        def nstr(x):
            return mpmath.nstr(x, 12)

        # beta_j close to 1 forces both gaps below delta/10
        lhs = max(g1, g2)
        rhs = mpmath.exp(-ep * ledger.loglog_q0)
        steps.append(ChainStep("max_gap", "max(1 - beta1, 1 - beta2) <= (log q0)^(-eps) <= delta/10",
                               bool(rhs <= d / 10), bool(lhs <= rhs and rhs <= d / 10),
                               nstr(lhs), nstr(rhs)))
        steps.append(ChainStep("eta_window", "delta/(2e) <= eta <= delta/e",
                               bool(hyp2), bool(de / 2 <= eta <= de),
                               nstr(eta), f"[{nstr(de / 2)}, {nstr(de)}]"))
        # ceil(log log q1) <= 2 log log q1 turns k*l into 2k log log q1
        ceil_ok = mpmath.ceil(L1) <= 2 * L1
        lhs_r = -mpmath.expm1(b * mpmath.log1p(-a1))
        rhs_r = mpmath.exp(b * log1m_a2) / 8
        rewriting_direct = bool(lhs_r >= rhs_r)
        steps.append(ChainStep("rewriting",
                               "1 - (1 - a1)^(2k loglog q1) >= (1/8)(1 - a2)^(2k loglog q1)",
                               bool(ceil_ok and 0 < a1 < 1 and 0 < a2 < 1), rewriting_direct,
                               nstr(lhs_r), nstr(rhs_r)))
        bern = bool(b >= 2) and bernoulli_check(a1, b)
        steps.append(ChainStep("bernoulli", "a b > 1 - (1 - a)^b with a = a1, b = 2k loglog q1 >= 2",
                               bern, bern, nstr(a1 * b), nstr(lhs_r)))
        # second inequality of the big-oh step, in log scale
        left = mpmath.log(eta + g1) - mpmath.log(16 * k * L1) + 2 * k * log1m_a2 * L1
        right = mpmath.log(eta) - mpmath.log(1920 * L1) + 240 * log1m_a2 * L1
        big = bool(left >= right)
        steps.append(ChainStep("big_oh",
                               "(1+eta-beta1)/(16k loglog q1) (log q1)^(2k log(1-a2)) "
                               ">= eta/(1920 loglog q1) (log q1)^(240 log(1-a2))",
                               big, big, nstr(left), nstr(right)))
        eps_min = 2 * mpmath.log(1920 * L1 / eta) / L1
        er = bool(ep > eps_min)
        steps.append(ChainStep("epsilon_range", "eps > 2 log(1920 loglog q1 / eta) / loglog q1",
                               er, er, nstr(ep), nstr(eps_min)))
        X = 240 * log1m_a2
        steps.append(ChainStep("theta",
                               "(log q1)^(-eps) >= (log q1)^(240 log(1-a2) - eps/2)",
                               bool(hyp1), bool(-ep >= X - ep / 2), nstr(-ep), nstr(X - ep / 2)))
        final_gap = de * (-mpmath.expm1(-ep / 480))
        steps.append(ChainStep("final_bound", "beta2 <= 1 - (delta/e)(1 - e^(-eps/480))",
                               bool(eta > 0), bool(g2 >= final_gap), nstr(g2), nstr(final_gap)))
        incompatible = final_gap > mpmath.exp(-ep * L2)
        contradiction = bool(hyp1 and hyp2 and incompatible and all(s.verdict for s in steps))
        return ChainReport(delta, eps, float(L1), float(L2), k, nstr(eta), nstr(a1), nstr(a2),
                           nstr(b), bool(hyp1), bool(hyp2), tuple(steps), nstr(final_gap),
                           contradiction, rewriting_direct)
