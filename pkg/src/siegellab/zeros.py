"""Zero localisation for zeta, L(s, chi) and D(s).

Counting is done with the argument principle: along each edge of a contour
the change of log f is accumulated from exact log-differences between
adjacent samples, with the branch of every step pinned by a trapezoid
quadrature of f'/f.  The two totals are compared; the count is rounded
only when they agree to within a quarter turn.

Sampling for counts and the first Newton solve run in float64 (vectorised);
zeros are then polished in mpmath when the context asks for more than 15
digits.  D(s) inventories are always unions of per-factor scans.
"""
from __future__ import annotations

import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Sequence

import mpmath
import numpy as np
from scipy.optimize import brentq

from .characters import RealPrimitiveCharacter
from .errors import (BoundaryZero, CountMismatch, ParameterOutOfRange,
                     QuadratureNotConverged)
from .lfunc import (DEFAULT_CONTEXT, CharacterPair, EvaluationContext,
                    evaluate_l, l_values_np)

DEFAULT_STRIP = (-0.5, 1.5)
CENTRAL_HALF_HEIGHT = 0.25
MAX_NODES_PER_EDGE = 200_000


# ---------------------------------------------------------------------------
# function specifications
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FunctionSpec:
    """An analytic function known both in float64 (vectorised) and in mpmath.

    ``np_eval(z) -> (f, f')`` on complex arrays, ``mp_eval(z, ctx) -> (f, f')``.
    ``trivial_zeros`` lists zeros inside the default strip that are not to be
    reported (s = 0 for even characters).
    """

    label: str
    np_eval: Callable
    mp_eval: Callable
    conductor: int = 1
    real_on_axis: bool = True
    trivial_zeros: tuple = ()
    source: str = ""


def _l_np(chi):
    return lambda z: l_values_np(z, chi)


def _l_mp(chi):
    def f(z, ctx):
        v = evaluate_l(z, chi, ctx, derivative=True, remove_pole=True)
        return v.value, v.derivative
    return f


def zeta_spec() -> FunctionSpec:
    """(s - 1) zeta(s): entire, same zeros as zeta."""
    return FunctionSpec("zeta", _l_np(None), _l_mp(None), 1, True, (), "zeta")


def l_function_spec(chi: RealPrimitiveCharacter) -> FunctionSpec:
    trivial = (0.0,) if chi.is_even else ()
    return FunctionSpec(chi.label(), _l_np(chi), _l_mp(chi), chi.q, True, trivial, chi.label())


def spec_for(target) -> FunctionSpec:
    """Accept a FunctionSpec, a character, an int discriminant, or None (zeta)."""
    if isinstance(target, FunctionSpec):
        return target
    if target is None or target == "zeta":
        return zeta_spec()
    if isinstance(target, int):
        return l_function_spec(RealPrimitiveCharacter(target))
    return l_function_spec(target)


# ---------------------------------------------------------------------------
# regions and the argument principle
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Rectangle:
    sigma0: float
    sigma1: float
    t0: float
    t1: float

    def edges(self):
        a = complex(self.sigma0, self.t0)
        b = complex(self.sigma1, self.t0)
        c = complex(self.sigma1, self.t1)
        d = complex(self.sigma0, self.t1)
        return [(a, b), (b, c), (c, d), (d, a)]

    def contains(self, z, slack: float = 0.0) -> bool:
        return (self.sigma0 - slack <= z.real <= self.sigma1 + slack
                and self.t0 - slack <= z.imag <= self.t1 + slack)

    def expanded(self, eps: Sequence[float]) -> "Rectangle":
        return Rectangle(self.sigma0 - eps[0], self.sigma1 + eps[1],
                         self.t0 - eps[2], self.t1 + eps[3])


@dataclass(frozen=True)
class Disk:
    center: complex
    radius: float

    def expanded(self, eps: Sequence[float]) -> "Disk":
        return Disk(self.center, self.radius + eps[0])


@dataclass
class CountResult:
    count: int
    region: object
    winding: float
    quadrature_error: float
    min_modulus: float
    evaluations: int


def _boundary_threshold() -> float:
    # sampling is float64, so the threshold is set from 15 digits
    return 10.0 ** (-15 / 2)


def _edge_winding(spec: FunctionSpec, path, dpath, n0: int, edge: int):
    """Change of log f along one parametrised edge u in [0, 1].

    Returns (arg change from log-differences, arg change from the trapezoid
    rule on f'/f, min |f|, evaluations).
    """
    u = np.linspace(0.0, 1.0, n0 + 1)
    thresh = _boundary_threshold()
    evals = 0
    cache_u = np.empty(0)
    cache_f = np.empty(0, dtype=complex)
    cache_fp = np.empty(0, dtype=complex)
    while True:
        new = np.setdiff1d(u, cache_u, assume_unique=False)
        if new.size:
            fn, fpn = spec.np_eval(path(new))
            evals += new.size
            cache_u = np.concatenate([cache_u, new])
            cache_f = np.concatenate([cache_f, fn])
            cache_fp = np.concatenate([cache_fp, fpn])
            o = np.argsort(cache_u)
            cache_u, cache_f, cache_fp = cache_u[o], cache_f[o], cache_fp[o]
        f, fp = cache_f, cache_fp
        if not (np.all(np.isfinite(f)) and np.all(np.isfinite(fp))):
            raise QuadratureNotConverged(f"non-finite values on {spec.label} contour")
        mod = np.abs(f)
        mn = float(mod.min())
        if mn < thresh:
            err = BoundaryZero(f"|f| = {mn:.2e} on the contour of {spec.label}")
            err.edge = edge
            raise err
        w = fp / f * dpath(u)
        du = np.diff(u)
        darg = np.angle(f[1:] / f[:-1])
        dlog = np.log(mod[1:] / mod[:-1])
        trap = 0.5 * (w[1:] + w[:-1]) * du
        disc = np.abs(trap.imag - darg) + np.abs(trap.real - dlog)
        bad = (np.abs(darg) > math.pi / 4) | (disc > 0.05 * du)
        if not bad.any():
            return float(darg.sum()), float(trap.imag.sum()), mn, evals
        if u.size > MAX_NODES_PER_EDGE:
            # only a zero hugging the contour forces this much refinement
            err = BoundaryZero(f"edge refinement exceeded {MAX_NODES_PER_EDGE} nodes "
                               f"(min |f| = {mn:.2e}) on {spec.label}")
            err.edge = edge
            raise err
        mids = 0.5 * (u[:-1][bad] + u[1:][bad])
        u = np.sort(np.concatenate([u, mids]))


def _initial_nodes(spec: FunctionSpec, a: complex, b: complex) -> int:
    length = abs(b - a)
    height = max(abs(a.imag), abs(b.imag)) + 3.0
    density = 2.0 + math.log(spec.conductor * height)
    return int(8 + length * density * 2)


def _winding_number(spec: FunctionSpec, region) -> CountResult:
    total_arg = 0.0
    total_quad = 0.0
    min_mod = math.inf
    evals = 0
    if isinstance(region, Rectangle):
        for i, (a, b) in enumerate(region.edges()):
            path = (lambda a, b: lambda u: a + (b - a) * u)(a, b)
            dpath = (lambda a, b: lambda u: np.full(u.shape, b - a, dtype=complex))(a, b)
            g, qd, mn, ev = _edge_winding(spec, path, dpath, _initial_nodes(spec, a, b), i)
            total_arg += g
            total_quad += qd
            min_mod = min(min_mod, mn)
            evals += ev
    elif isinstance(region, Disk):
        c, r = complex(region.center), region.radius
        path = lambda u: c + r * np.exp(2j * math.pi * u)
        dpath = lambda u: 2j * math.pi * r * np.exp(2j * math.pi * u)
        n0 = int(16 + 2 * math.pi * r * 8 * (2 + math.log(spec.conductor * (abs(c.imag) + r + 3))))
        total_arg, total_quad, min_mod, evals = _edge_winding(spec, path, dpath, n0, 0)
    else:
        raise TypeError("region must be a Rectangle or a Disk")
    winding = total_arg / (2 * math.pi)
    qerr = abs(total_quad - total_arg) / (2 * math.pi)
    if qerr >= 0.25:
        raise QuadratureNotConverged(f"quadrature error {qerr:.3f} turns")
    count = int(round(winding))
    if abs(winding - count) > 1e-6:
        raise QuadratureNotConverged(f"winding {winding} not an integer")
    if count < 0:
        raise QuadratureNotConverged("negative zero count (function not analytic?)")
    return CountResult(count, region, winding, qerr, min_mod, evals)


def count_zeros_detailed(target, region, ctx: EvaluationContext = DEFAULT_CONTEXT,
                         dodge: bool = True, seed: int = 0) -> CountResult:
    """Argument-principle count with boundary-zero dodging.

    If a contour passes too close to a zero, the region is enlarged by random
    amounts in [1e-6, 1e-5] and recounted, at most five times.
    """
    spec = spec_for(target)
    rng = np.random.default_rng(seed)
    current = region
    for attempt in range(6):
        try:
            return _winding_number(spec, current)
        except BoundaryZero:
            if not dodge or attempt == 5:
                raise
            current = region.expanded(rng.uniform(1e-6, 1e-5, size=4))
    raise AssertionError("unreachable")


def count_zeros_region(target, region, ctx: EvaluationContext = DEFAULT_CONTEXT) -> int:
    """Number of zeros (with multiplicity) inside a Rectangle or Disk."""
    return count_zeros_detailed(target, region, ctx).count


# ---------------------------------------------------------------------------
# zero records and refinement
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ZeroRecord:
    location: mpmath.mpc
    error_radius: float
    kind: str  # "real" | "complex_pair" | "trivial"
    source: str

    @property
    def beta(self) -> float:
        return float(self.location.real)

    @property
    def gamma(self) -> float:
        return float(self.location.imag)

    def sort_key(self):
        return (abs(self.gamma), self.gamma, self.beta)


def _newton_np(spec: FunctionSpec, z0: complex, step_limit: float, maxit: int = 80):
    z = complex(z0)
    for _ in range(maxit):
        if abs(z - z0) > 4 * step_limit:
            return None
        f, fp = spec.np_eval(np.array([z]))
        f, fp = complex(f[0]), complex(fp[0])
        if fp == 0 or not math.isfinite(abs(f)):
            return None
        step = f / fp
        if abs(step) > step_limit:
            step *= step_limit / abs(step)
        z -= step
        if abs(step) <= 4e-15 * max(1.0, abs(z)):
            return z
    return None


def refine_zero(spec: FunctionSpec, z, ctx: EvaluationContext, real: bool = False,
                kind: str | None = None) -> ZeroRecord:
    """Polish an approximate zero and attach a Newton-certificate radius.

    The radius r satisfies |f(z)| < |f'(z)| r at the returned location.
    """
    if ctx.is_double:
        f, fp = spec.np_eval(np.array([complex(z)]))
        f, fp = complex(f[0]), complex(fp[0])
        step = f / fp if fp else 0.0
        loc = complex(z) - step
        if real:
            loc = complex(loc.real, 0.0)
        f, fp = spec.np_eval(np.array([loc]))
        ratio = abs(complex(f[0]) / complex(fp[0])) if fp[0] else 1.0
        radius = max(2.0 * ratio, 4e-15 * max(1.0, abs(loc)))
        location = mpmath.mpc(loc)
    else:
        digits = ctx.precision_digits
        with mpmath.workdps(digits + 10):
            w = mpmath.mpc(z)
            if real:
                w = mpmath.mpc(w.real, 0)
            tol = mpmath.mpf(10) ** (-digits - 2) * max(1, abs(w))
            for _ in range(12):
                f, fp = spec.mp_eval(w, ctx)
                step = f / fp
                if real:
                    step = mpmath.mpc(step.real, 0)
                w -= step
                if abs(step) < tol:
                    break
            f, fp = spec.mp_eval(w, ctx)
            ratio = abs(f / fp) if fp else mpmath.mpf(1)
            floor = mpmath.mpf(10) ** (-digits) * max(1, abs(w))
            radius = float(max(2 * ratio, floor))
            location = +w
    if kind is None:
        kind = "real" if abs(float(location.imag)) < radius else "complex_pair"
    return ZeroRecord(location, radius, kind, spec.source or spec.label)


# ---------------------------------------------------------------------------
# real zeros
# ---------------------------------------------------------------------------

def _real_sign_changes(spec: FunctionSpec, a: float, b: float, n: int):
    x = np.linspace(a, b, n + 1)
    f, _ = spec.np_eval(x.astype(complex))
    v = f.real
    roots = []
    for i in range(n):
        if v[i] == 0:
            roots.append(x[i])
        elif v[i] * v[i + 1] < 0:
            g = lambda t: float(spec.np_eval(np.array([complex(t)]))[0][0].real)
            roots.append(brentq(g, x[i], x[i + 1], xtol=1e-15, rtol=1e-15))
    if v[n] == 0:
        roots.append(x[n])
    return roots


def _real_zeros(spec: FunctionSpec, a: float, b: float, ctx: EvaluationContext,
                half_height: float | None = None, max_grid: int = 8192):
    """Real zeros in [a, b] matched against a thin-rectangle count."""
    h = half_height if half_height is not None else min(0.05, (b - a) / 4)
    res = count_zeros_detailed(spec, Rectangle(a, b, -h, h), ctx)
    n = 61
    while True:
        roots = _real_sign_changes(spec, a, b, n)
        if len(roots) == res.count:
            break
        if len(roots) > res.count or n >= max_grid:
            raise CountMismatch(
                f"{spec.label}: {len(roots)} sign changes on [{a}, {b}] but contour count {res.count}")
        n *= 4
    return roots


def locate_real_zeros(target, interval: tuple, ctx: EvaluationContext = DEFAULT_CONTEXT):
    """All real zeros in [sigma0, sigma1] as refined ZeroRecords."""
    spec = spec_for(target)
    a, b = float(interval[0]), float(interval[1])
    if a <= 0:
        raise ValueError("sigma0 must be positive")
    if not spec.real_on_axis:
        raise ValueError("function is not real on the real axis")
    roots = _real_zeros(spec, a, b, ctx)
    return [refine_zero(spec, r, ctx, real=True, kind="real") for r in roots]


# ---------------------------------------------------------------------------
# inventories
# ---------------------------------------------------------------------------

@dataclass
class ZeroInventory:
    """Zeros with gamma > 0 (conjugates implied) and real nontrivial zeros.

    ``argument_total`` is the argument-principle count of nontrivial zeros in
    the scanned region with Im >= 0 counted once per conjugate pair;
    ``listed_count`` must equal it for the inventory to be certified.
    """

    target: str
    T: float
    T_certified: float
    zeros: list
    argument_total: int
    listed_count: int
    strip: tuple = DEFAULT_STRIP
    t_start: float = 0.0
    unresolved: list = field(default_factory=list)
    precision_digits: int = 15
    sources: tuple = ()

    @property
    def certified(self) -> bool:
        return self.argument_total == self.listed_count and not self.unresolved

    @property
    def complex_zeros(self) -> list:
        return [z for z in self.zeros if z.kind == "complex_pair"]

    @property
    def real_zeros(self) -> list:
        return [z for z in self.zeros if z.kind == "real"]

    def count_up_to(self, T: float) -> int:
        """Zeros with |Im| <= T, both signs: N(T) when t_start == 0."""
        if T > self.T_certified + 1e-12:
            raise ValueError(f"inventory certified only to {self.T_certified}")
        return (2 * sum(1 for z in self.complex_zeros if z.gamma <= T)
                + len(self.real_zeros))

    def truncated(self, T: float) -> "ZeroInventory":
        keep = [z for z in self.zeros if abs(z.gamma) <= T]
        n = sum(1 for z in keep)
        return ZeroInventory(self.target, T, min(T, self.T_certified), keep, n, n, self.strip,
                             self.t_start, list(self.unresolved), self.precision_digits,
                             self.sources)

    @staticmethod
    def union(target: str, parts: Iterable["ZeroInventory"]) -> "ZeroInventory":
        parts = list(parts)
        zeros = sorted((z for p in parts for z in p.zeros), key=ZeroRecord.sort_key)
        return ZeroInventory(
            target=target,
            T=min(p.T for p in parts),
            T_certified=min(p.T_certified for p in parts),
            zeros=zeros,
            argument_total=sum(p.argument_total for p in parts),
            listed_count=sum(p.listed_count for p in parts),
            strip=parts[0].strip,
            t_start=max(p.t_start for p in parts),
            unresolved=[u for p in parts for u in p.unresolved],
            precision_digits=min(p.precision_digits for p in parts),
            sources=tuple(p.target for p in parts),
        )


def _slab_height(spec: FunctionSpec, t: float) -> float:
    density = math.log(max(spec.conductor * (t + 3) / (2 * math.pi), 2.0)) / (2 * math.pi)
    return min(4.0, max(0.25, 1.5 / density))


class _Scanner:
    def __init__(self, spec: FunctionSpec, ctx: EvaluationContext, strip, seed: int = 0,
                 max_depth: int = 60):
        self.spec = spec
        self.ctx = ctx
        self.s0, self.s1 = strip
        self.rng = np.random.default_rng(seed)
        self.max_depth = max_depth
        self.found: list = []
        self.unresolved: list = []

    def count(self, t0, t1, s0=None, s1=None):
        rect = Rectangle(self.s0 if s0 is None else s0, self.s1 if s1 is None else s1, t0, t1)
        return _winding_number(self.spec, rect).count

    def safe_cut(self, t0, t1, t):
        """A height near t whose horizontal line avoids zeros of f."""
        for _ in range(6):
            try:
                _edge_winding(self.spec,
                              lambda u: complex(self.s0, t) + (self.s1 - self.s0) * u,
                              lambda u: np.full(u.shape, self.s1 - self.s0, dtype=complex),
                              _initial_nodes(self.spec, complex(self.s0, t), complex(self.s1, t)), 0)
                return t
            except BoundaryZero:
                t += float(self.rng.uniform(1e-6, 1e-5))
        raise BoundaryZero(f"cannot place a cut near t={t}")

    def resolve(self, t0, t1, n, s0=None, s1=None, depth=0):
        s0 = self.s0 if s0 is None else s0
        s1 = self.s1 if s1 is None else s1
        if n == 0:
            return
        if n == 1:
            rect = Rectangle(s0, s1, t0, t1)
            start = complex(0.5 * (s0 + s1), 0.5 * (t0 + t1))
            z = _newton_np(self.spec, start, step_limit=max(t1 - t0, s1 - s0))
            if z is not None and rect.contains(z, slack=1e-12):
                self.found.append(z)
                return
        if depth >= self.max_depth or (t1 - t0) < 1e-9:
            self.unresolved.append((s0, s1, t0, t1, n))
            return
        if (t1 - t0) < (s1 - s0):
            # off-centre so the cut never runs along the critical line
            sm = s0 + 0.382 * (s1 - s0)
            # vertical cut; zeros on it are dodged by moving it sideways
            for attempt in range(6):
                try:
                    c_left = _winding_number(self.spec, Rectangle(s0, sm, t0, t1)).count
                    break
                except BoundaryZero:
                    if attempt == 5:
                        raise
                    sm += float(self.rng.uniform(1e-6, 1e-5))
            self.resolve(t0, t1, c_left, s0, sm, depth + 1)
            self.resolve(t0, t1, n - c_left, sm, s1, depth + 1)
            return
        tm = self.safe_cut(t0, t1, 0.5 * (t0 + t1))
        c_low = _winding_number(self.spec, Rectangle(s0, s1, t0, tm)).count
        self.resolve(t0, tm, c_low, s0, s1, depth + 1)
        self.resolve(tm, t1, n - c_low, s0, s1, depth + 1)


def scan_inventory(target, T: float, ctx: EvaluationContext = DEFAULT_CONTEXT,
                   t_start: float = 0.0, strip: tuple = DEFAULT_STRIP,
                   seed: int = 0) -> ZeroInventory:
    """All nontrivial zeros with 0 <= Im <= T (or t_start < Im <= T).

    The region is cut into slabs, each slab bisected until every cell holds
    at most one zero, and every zero refined.  The certificate compares the
    count over the whole region with the number of listed zeros.
    """
    spec = spec_for(target)
    if T < 1 and t_start == 0:
        raise ValueError("T must be at least 1")
    scanner = _Scanner(spec, ctx, strip, seed=seed)
    records: list = []
    arg_total = 0
    if t_start == 0:
        tau = CENTRAL_HALF_HEIGHT
        central = count_zeros_detailed(spec, Rectangle(strip[0], strip[1], -tau, tau), ctx)
        roots = _real_sign_changes(spec, strip[0], strip[1], 251)
        if len(roots) != central.count:
            raise CountMismatch(
                f"{spec.label}: {central.count} zeros near the real axis, {len(roots)} real")
        for r in roots:
            if any(abs(r - t) < 1e-8 for t in spec.trivial_zeros):
                continue
            records.append(refine_zero(spec, r, ctx, real=True, kind="real"))
        arg_total += central.count - sum(
            1 for t in spec.trivial_zeros if strip[0] < t < strip[1])
        lower = tau
    else:
        lower = t_start
    # certify the top edge first so that T_certified is fixed up front
    T_cert = scanner.safe_cut(lower, T, float(T))
    total = _winding_number(spec, Rectangle(strip[0], strip[1], lower, T_cert)).count
    arg_total += total
    t0 = lower
    slab_sum = 0
    while t0 < T_cert:
        t1 = t0 + _slab_height(spec, t0)
        if t1 >= T_cert - 1e-9:
            t1 = T_cert
        else:
            t1 = scanner.safe_cut(t0, T_cert, t1)
        n = scanner.count(t0, t1)
        slab_sum += n
        scanner.resolve(t0, t1, n)
        t0 = t1
    if slab_sum != total:
        raise CountMismatch(f"{spec.label}: slab counts {slab_sum} != region count {total}")
    for z in scanner.found:
        records.append(refine_zero(spec, z, ctx, kind="complex_pair"))
    records.sort(key=ZeroRecord.sort_key)
    listed = len(records)
    return ZeroInventory(spec.label, float(T), float(T_cert), records, arg_total, listed,
                         tuple(strip), float(t_start), list(scanner.unresolved),
                         ctx.precision_digits, (spec.label,))


def scan_pair_inventory(pair: CharacterPair, T: float,
                        ctx: EvaluationContext = DEFAULT_CONTEXT,
                        workers: int = 1) -> tuple[ZeroInventory, dict]:
    """Per-factor inventories for D(s) and their multiset union."""
    targets = [(label, c) for label, c in pair.factors()]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            invs = list(ex.map(_scan_job, [(c, T, ctx) for _, c in targets]))
    else:
        invs = [scan_inventory(c, T, ctx) for _, c in targets]
    parts = {label: inv for (label, _), inv in zip(targets, invs)}
    return ZeroInventory.union(pair.label(), invs), parts


def _scan_job(args):
    c, T, ctx = args
    return scan_inventory(c, T, ctx)


# ---------------------------------------------------------------------------
# Hypothesis H_delta
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HDeltaReport:
    target: str
    delta: float
    count_in_disk: int
    count_real: int
    all_real: bool

    def to_dict(self) -> dict:
        return {"target": self.target, "delta": self.delta,
                "count_in_disk": self.count_in_disk, "count_real": self.count_real,
                "all_real": self.all_real}


def verify_H_delta(target, delta: float, ctx: EvaluationContext = DEFAULT_CONTEXT) -> HDeltaReport:
    """Count zeros in |s - 1| < delta and check that all of them are real."""
    # the endpoint 1/10 is admitted so that the standard family check at
    # delta = 0.1 can be run
    if not 0 < delta <= 0.1:
        raise ParameterOutOfRange("delta must lie in (0, 1/10]")
    spec = spec_for(target)
    in_disk = count_zeros_region(spec, Disk(1.0, delta), ctx)
    real = locate_real_zeros(spec, (1.0 - delta, 1.0), ctx)
    return HDeltaReport(spec.label, delta, in_disk, len(real), in_disk == len(real))


def _hdelta_job(args):
    d, delta, ctx = args
    return verify_H_delta(d, delta, ctx)


def hdelta_family(bound: int, delta: float, ctx: EvaluationContext = DEFAULT_CONTEXT,
                  workers: int = 1) -> list[HDeltaReport]:
    """verify_H_delta for every fundamental discriminant with |d| <= bound."""
    from .characters import enumerate_fundamental_discriminants

    jobs = [(d, delta, ctx) for d in enumerate_fundamental_discriminants(bound)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            return list(ex.map(_hdelta_job, jobs, chunksize=4))
    return [_hdelta_job(j) for j in jobs]


# ---------------------------------------------------------------------------
# explicit zero-count window and trivial zeros
# ---------------------------------------------------------------------------

def predicted_window_N_D(T: float, q1: int, q2: int, q_psi: int) -> tuple[float, float]:
    """(main - err, main + err) for the count of zeros of D with |Im| <= T.

    main = (T/pi) log(q1 q2 q_psi (T/(2 pi e))^4), err = log(q1 q2 q_psi T^4) + 28,
    valid for T >= 5/7.
    """
    if T < 5 / 7:
        raise ValueError("window valid only for T >= 5/7")
    Q = q1 * q2 * q_psi
    main = T / math.pi * (math.log(Q) + 4 * math.log(T / (2 * math.pi * math.e)))
    err = math.log(Q) + 4 * math.log(T) + 28
    return main - err, main + err


def window_power_sum(T: float, exponent: float, Q: int, counted: int) -> tuple[float, float]:
    """Interval for S = sum_{|gamma| > T} |gamma|^{-exponent} over zeros of D.

    By partial summation S = -N(T) T^{-e} + e int_T^inf N(t) t^{-e-1} dt, with
    N(T) = ``counted`` taken from a certified scan and N(t) enclosed by the
    window main(t) +- err(t).  Both integrals are done in closed form.
    """
    e = exponent
    if e <= 1:
        return 0.0, math.inf
    if T < 5 / 7:
        raise ValueError("window valid only for T >= 5/7")
    lQ = math.log(Q)
    c = 4 * math.log(2 * math.pi * math.e)
    lT = math.log(T)

    # int_T^inf t^{-p} (a + b log t) dt
    def integ(p, a, b):
        k = p - 1
        return T ** (-k) * ((a + b * lT) / k + b / k ** 2)

    main = e * integ(e, (lQ - c) / math.pi, 4 / math.pi) - counted * T ** (-e)
    half = e * integ(e + 1, lQ + 28, 4)
    return max(0.0, main - half), main + half


def nontrivial_tail_bound(T: float, exponent: float, Q: int, counted: int) -> float:
    """Upper bound for sum_{|gamma| > T} |gamma|^{-exponent} over zeros of D."""
    return window_power_sum(T, exponent, Q, counted)[1]


@dataclass(frozen=True)
class TrivialZeroSpec:
    """Starting points of the trivial-zero progressions (step -2) of each factor."""

    starts: tuple  # e.g. (-2, 0, -1, 0) for zeta, even, odd, even
    ord_at_zero: int

    @classmethod
    def for_factors(cls, chars: Iterable[RealPrimitiveCharacter | None]) -> "TrivialZeroSpec":
        starts = []
        for c in chars:
            if c is None:
                starts.append(-2)
            else:
                starts.append(0 if c.is_even else -1)
        return cls(tuple(starts), sum(1 for s in starts if s == 0))

    @classmethod
    def for_pair(cls, pair: CharacterPair) -> "TrivialZeroSpec":
        return cls.for_factors([None, *pair.characters])


def trivial_zero_tail(spec: TrivialZeroSpec, s: float, exponent: int, cutoff: int,
                      dps: int = 30):
    """Sum over negative trivial zeros w of (s - w)^{-exponent}.

    Terms with w >= -cutoff are summed exactly.  For each progression the
    rest, sum_{j>=0} f(x0 + 2j) with f(x) = x^{-exponent} decreasing, lies in
    [I, I + f(x0)] where I = int_{x0}^inf f / 2; the midpoint is added to the
    value and the half-width f(x0)/2 is returned as the bound.  The zero at
    s = 0 is excluded (it enters through ``ord_at_zero``).
    """
    if s <= 0 or exponent < 2:
        raise ValueError("need s > 0 and exponent >= 2")
    total = mpmath.mpf(0)
    bound = 0.0
    with mpmath.workdps(dps + 5):
        sm = mpmath.mpf(s)
        for start in spec.starts:
            w = start if start < 0 else start - 2
            terms = []
            while w >= -cutoff:
                terms.append((sm - w) ** (-exponent))
                w -= 2
            x0 = sm - w
            integral = x0 ** (1 - exponent) / (2 * (exponent - 1))
            terms.append(integral + x0 ** (-exponent) / 2)
            total += mpmath.fsum(terms)
            bound += float(x0 ** (-exponent)) / 2
    return +total, bound


# ---------------------------------------------------------------------------
# zero cache (JSON lines)
# ---------------------------------------------------------------------------

def _fmt(x, digits: int) -> str:
    return mpmath.nstr(mpmath.mpf(x), digits + 3, strip_zeros=False) if digits > 15 else repr(float(x))


def cache_records(inv: ZeroInventory, d_or_pair) -> list[dict]:
    """Serialise an inventory; the last record certifies the height."""
    out = []
    for z in inv.zeros:
        out.append({"target": inv.target, "d_or_pair": d_or_pair,
                    "beta": _fmt(z.location.real, inv.precision_digits),
                    "gamma": _fmt(z.location.imag, inv.precision_digits),
                    "error_radius": z.error_radius, "kind": z.kind,
                    "precision_digits": inv.precision_digits,
                    "T_certified": inv.T_certified})
    out.append({"target": inv.target, "d_or_pair": d_or_pair, "beta": None, "gamma": None,
                "error_radius": 0.0, "kind": "certificate",
                "precision_digits": inv.precision_digits, "T_certified": inv.T_certified,
                "t_start": inv.t_start, "argument_total": inv.argument_total,
                "listed_count": inv.listed_count})
    return out


def append_cache(path: Path, records: list[dict]):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "a", encoding="utf-8") as fh:
        for r in records:
            fh.write(json.dumps(r, sort_keys=True) + "\n")


def load_cached_inventory(path: Path, target: str, precision_digits: int):
    """Rebuild the inventory stored for (target, precision), or None."""
    path = Path(path)
    if not path.exists():
        return None
    zeros, certs = [], []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            r = json.loads(line)
            if r["target"] != target or r["precision_digits"] != precision_digits:
                continue
            if r["kind"] == "certificate":
                certs.append(r)
            else:
                with mpmath.workdps(max(precision_digits, 15) + 5):
                    loc = mpmath.mpc(mpmath.mpf(r["beta"]), mpmath.mpf(r["gamma"]))
                zeros.append(ZeroRecord(loc, float(r["error_radius"]), r["kind"], target))
    if not certs:
        return None
    # certificates must tile [0, T] contiguously
    certs.sort(key=lambda c: c.get("t_start", 0.0))
    if certs[0].get("t_start", 0.0) != 0.0:
        return None
    height = 0.0
    arg_total = listed = 0
    for c in certs:
        if c.get("t_start", 0.0) > height + 1e-9:
            break
        height = max(height, c["T_certified"])
        arg_total += c["argument_total"]
        listed += c["listed_count"]
    zeros = sorted((z for z in zeros if z.gamma <= height), key=ZeroRecord.sort_key)
    return ZeroInventory(target, height, height, zeros, arg_total, listed,
                         DEFAULT_STRIP, 0.0, [], precision_digits, (target,))


def cached_scan(target, T: float, ctx: EvaluationContext, cache_dir: Path,
                d_or_pair=None) -> ZeroInventory:
    """scan_inventory through an append-only cache; lower caches are extended."""
    spec = spec_for(target)
    path = Path(cache_dir) / f"zeros_{spec.label}.jsonl"
    inv = load_cached_inventory(path, spec.label, ctx.precision_digits)
    if inv is not None and inv.T_certified >= T:
        return inv.truncated(T) if inv.T_certified > T else inv
    if inv is None:
        fresh = scan_inventory(spec, T, ctx)
        append_cache(path, cache_records(fresh, d_or_pair))
        return fresh
    ext = scan_inventory(spec, T, ctx, t_start=inv.T_certified)
    append_cache(path, cache_records(ext, d_or_pair))
    return load_cached_inventory(path, spec.label, ctx.precision_digits)
