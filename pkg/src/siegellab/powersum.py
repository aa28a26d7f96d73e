"""Turán's power-sum method on sequences built from zeros of D(s).

With z_1 = (1 + eta - beta2)^(-l) and z_j = (1 + eta - w_j)^(-l) for the
non-real zeros w_j, Turán's lemma gives some 1 <= k <= 24K with
Re sum z_j^k >= |z_1|^k / 8, where K = sum |z_j| / |z_1|.

Everything is divided by |z_1| first; both sides of the threshold scale by
the same factor, so the set of valid k is unchanged and the powers stay
bounded by one.  Selection runs in mpmath, the oracle in numpy.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import mpmath
import numpy as np

from .errors import NoValidK, OrderingViolation, ParameterOutOfRange

DEFAULT_DPS = 30


@dataclass(frozen=True)
class PowerSumInstance:
    z: tuple  # mpc values, nonincreasing modulus
    provenance: dict = field(default_factory=dict, compare=False)
    dps: int = DEFAULT_DPS

    def __post_init__(self):
        if not self.z:
            raise ValueError("instance needs at least z_1")

    @property
    def K(self) -> float:
        return float(compute_K(self))

    def __len__(self):
        return len(self.z)

    def normalised(self) -> list:
        with mpmath.workdps(self.dps + 10):
            m = abs(mpmath.mpc(self.z[0]))
            return [mpmath.mpc(v) / m for v in self.z]


@dataclass(frozen=True)
class PowerSumResult:
    k: int
    value: mpmath.mpf  # Re sum z_j^k
    threshold: mpmath.mpf  # |z_1|^k / 8
    k_bound_used: int
    imag_part: float  # |Im sum z_j^k| / |z_1|^k

    def to_dict(self) -> dict:
        return {"k": self.k, "value": mpmath.nstr(self.value, 20),
                "threshold": mpmath.nstr(self.threshold, 20),
                "k_bound_used": self.k_bound_used, "imag_part": self.imag_part}


def instance_from_values(values, dps: int = DEFAULT_DPS, **provenance) -> PowerSumInstance:
    """Wrap an explicit sequence (already ordered by nonincreasing modulus)."""
    with mpmath.workdps(dps + 10):
        z = tuple(mpmath.mpc(v) for v in values)
    mods = [abs(v) for v in z]
    if any(mods[i] < mods[i + 1] for i in range(len(mods) - 1)):
        raise OrderingViolation("values are not in nonincreasing modulus order")
    return PowerSumInstance(z, dict(provenance), dps)


def build_instance(zeros, beta2, eta, ell: int, dps: int = DEFAULT_DPS,
                   inventory_id: str = "") -> PowerSumInstance:
    """z_1 from beta2, then every non-real zero and its conjugate.

    ``zeros`` is a ZeroInventory or an iterable of ZeroRecord / complex with
    positive imaginary part (conjugates are added here).  Real zeros are
    skipped.
    """
    if ell < 1:
        raise ParameterOutOfRange("l must be a positive integer")
    recs = getattr(zeros, "zeros", zeros)
    with mpmath.workdps(dps + 10):
        eta = mpmath.mpf(eta)
        beta2 = mpmath.mpf(beta2)
        if eta <= 0:
            raise ParameterOutOfRange("eta must be positive")
        if beta2 >= 1:
            raise ParameterOutOfRange("beta2 must be below 1")
        z1 = (1 + eta - beta2) ** (-ell)
        entries = []
        for r in recs:
            w = mpmath.mpc(getattr(r, "location", r))
            if w.imag == 0 or getattr(r, "kind", "complex_pair") == "real":
                continue
            for v in (w, mpmath.conj(w)):
                zj = (1 + eta - v) ** (-ell)
                entries.append((-abs(zj), float(v.imag), float(v.real), zj))
        entries.sort(key=lambda e: (e[0], e[1], e[2]))
        if entries and -entries[0][0] > abs(z1):
            bad = entries[0]
            raise OrderingViolation(
                f"zero {bad[2]:.6g}{bad[1]:+.6g}i gives |z_j| > |z_1|; "
                "the separation 1 + eta - beta2 <= |1 + eta - w| fails")
        z = (mpmath.mpc(z1),) + tuple(e[3] for e in entries)
    prov = {"eta": float(eta), "ell": ell, "beta2": float(beta2), "inventory": inventory_id}
    return PowerSumInstance(z, prov, dps)


def compute_K(instance: PowerSumInstance):
    """K = sum |z_j| / |z_1| (mpf, >= 1)."""
    with mpmath.workdps(instance.dps + 10):
        m = abs(mpmath.mpc(instance.z[0]))
        return mpmath.fsum(abs(mpmath.mpc(v)) for v in instance.z) / m


def default_kmax(instance: PowerSumInstance) -> int:
    with mpmath.workdps(instance.dps + 10):
        return int(mpmath.ceil(24 * compute_K(instance)))


def paper_K_bound(inventory, delta: float, ell: int, q1: int, q2: int = 0, q_psi: int = 0) -> float:
    """Closed-form upper bound for K from the explicit zero-count window.

    1 + e^-l (28 - 4 log(2 pi e)/pi + 3 (1 + 1/pi) log q1)
      + 3 (delta/e)^l ((1 + 1/((1 - 1/l) pi)) log q1 - 1).
    Only q1 enters; the other arguments are accepted for a uniform signature.
    """
    if ell < 3:
        raise ParameterOutOfRange("the closed form needs l >= 3")
    L = math.log(q1)
    a = math.exp(-ell) * (28 - 4 * math.log(2 * math.pi * math.e) / math.pi
                          + 3 * (1 + 1 / math.pi) * L)
    b = 3 * (delta / math.e) ** ell * ((1 + 1 / ((1 - 1 / ell) * math.pi)) * L - 1)
    return 1 + a + b


def _power_sums(instance: PowerSumInstance, kmax: int):
    """Yield (k, Re, Im) of sum (z_j/|z_1|)^k for k = 1..kmax."""
    w = instance.normalised()
    p = list(w)
    for k in range(1, kmax + 1):
        if k > 1:
            p = [a * b for a, b in zip(p, w)]
        s = mpmath.fsum(p)
        yield k, s.real, s.imag


def turan_select_k(instance: PowerSumInstance, kmax: int | None = None) -> PowerSumResult:
    """Smallest k in [1, kmax] with Re sum z_j^k >= |z_1|^k / 8."""
    if kmax is None:
        kmax = default_kmax(instance)
    with mpmath.workdps(instance.dps + 10):
        eighth = mpmath.mpf(1) / 8
        for k, re, im in _power_sums(instance, kmax):
            if re >= eighth:
                m = abs(mpmath.mpc(instance.z[0])) ** k
                return PowerSumResult(k, +(re * m), +(eighth * m), kmax, float(abs(im)))
    raise NoValidK(f"no k in [1, {kmax}] satisfies the power-sum inequality")


def turan_oracle(instance: PowerSumInstance, kmax: int | None = None) -> list[int]:
    """Every valid k in [1, kmax] by direct float64 evaluation."""
    if kmax is None:
        kmax = default_kmax(instance)
    w = np.array([complex(v) for v in instance.normalised()])
    k = np.arange(1, kmax + 1)
    re = (w[None, :] ** k[:, None]).sum(axis=1).real
    return [int(x) for x in k[re >= 0.125]]
