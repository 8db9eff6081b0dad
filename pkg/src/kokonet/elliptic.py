"""Elliptic kernel: complete integrals, Jacobi functions, phase shifts, lattice.

Everything the classification needs lives on the real axis and on the four
vertical lines m*K + i*(0, K') of the period rectangle, where all relevant
quantities are real.  Real-axis values come from the descending Landen/AGM
recursion; vertical lines are reached through Jacobi's imaginary
transformation plus quarter-period shifts, so no general complex arithmetic
is required.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .angles import PqClass
from .errors import EllipticOverflow, PhaseShiftInconsistent

_AGM_CAP = 32
_AGM_TOL = 1e-15

# Margin (relative to K') keeping vertical-line evaluation away from the pole.
_POLE_MARGIN = 1e-9


class LatticeKind(Enum):
    RECTANGULAR = "rectangular"   # M < 1: generators 4K, 2iK'
    RHOMBIC = "rhombic"           # M > 1: generators 4K, 2K + 2iK'


def complete_K(k: float) -> float:
    """Complete elliptic integral of the first kind via the AGM."""
    if not 0.0 <= k < 1.0:
        raise ValueError(f"modulus k={k!r} outside [0, 1)")
    a, b = 1.0, math.sqrt(1.0 - k * k)
    for _ in range(_AGM_CAP):
        if abs(a - b) <= _AGM_TOL * a:
            break
        a, b = 0.5 * (a + b), math.sqrt(a * b)
    return math.pi / (2.0 * a)


def jacobi_real(u: float, k: float) -> tuple[float, float, float]:
    """Jacobi sn, cn, dn for real argument via descending Landen recursion."""
    if not 0.0 <= k < 1.0:
        raise ValueError(f"modulus k={k!r} outside [0, 1)")
    if k < 1e-12:
        return math.sin(u), math.cos(u), 1.0

    # descending sequence of moduli
    a = [1.0]
    c = [k]
    b = math.sqrt(1.0 - k * k)
    n = 0
    while abs(c[n]) > _AGM_TOL * abs(a[n]) and n < _AGM_CAP:
        an = 0.5 * (a[n] + b)
        cn = 0.5 * (a[n] - b)
        b = math.sqrt(a[n] * b)
        a.append(an)
        c.append(cn)
        n += 1

    phi = (2.0 ** n) * a[n] * u
    for i in range(n, 0, -1):
        phi = 0.5 * (phi + math.asin(max(-1.0, min(1.0, c[i] / a[i] * math.sin(phi)))))

    sn = math.sin(phi)
    cn = math.cos(phi)
    dn = math.sqrt(max(1.0 - k * k * sn * sn, 0.0))
    return sn, cn, dn


@dataclass(frozen=True)
class EllipticContext:
    """Modulus data of an equimodular net (common modulus M, M != 1)."""

    M: float
    k: float
    k_prime: float
    K: float
    K_prime: float
    lattice: LatticeKind

    @staticmethod
    def from_modulus(M: float) -> "EllipticContext":
        if M <= 0.0 or M == 1.0:
            raise ValueError(f"common modulus M={M!r} must be positive and != 1")
        k = math.sqrt(1.0 - M) if M < 1.0 else math.sqrt(1.0 - 1.0 / M)
        kp = math.sqrt(1.0 - k * k)
        return EllipticContext(
            M=M, k=k, k_prime=kp,
            K=complete_K(k), K_prime=complete_K(kp),
            lattice=LatticeKind.RECTANGULAR if M < 1.0 else LatticeKind.RHOMBIC,
        )


@dataclass(frozen=True)
class PhaseShift:
    """A point t = m*K + i*v with m in {0,1,2,3} and v strictly in (0, K')."""

    m: int
    v: float

    def __post_init__(self):
        if self.m not in (0, 1, 2, 3):
            raise ValueError(f"m={self.m!r} outside {{0,1,2,3}}")
        if self.v <= 0.0:
            raise ValueError(f"v={self.v!r} not strictly positive")

    def as_complex(self, ctx: EllipticContext) -> complex:
        return complex(self.m * ctx.K, self.v)


def dn_vertical(t: PhaseShift, ctx: EllipticContext) -> float:
    """dn(m*K + i*v, k), real and positive on the vertical lines.

    Even m: dn(i*v) = dn(v, k')/cn(v, k'), increasing from 1 to +inf.
    Odd m:  dn(K + i*v) = k' * cn(v, k')/dn(v, k'), decreasing from k' to 0.
    """
    if t.v >= ctx.K_prime * (1.0 - _POLE_MARGIN):
        if t.m % 2 == 0:
            raise EllipticOverflow(
                f"v={t.v!r} within pole margin of K'={ctx.K_prime!r} on an even line"
            )
        if t.v >= ctx.K_prime:
            raise ValueError(f"v={t.v!r} not strictly below K'={ctx.K_prime!r}")
    snp, cnp, dnp = jacobi_real(t.v, ctx.k_prime)
    if t.m % 2 == 0:
        return dnp / cnp
    return ctx.k_prime * cnp / dnp


def _dn_vertical_derivative(m: int, v: float, ctx: EllipticContext) -> float:
    """d/dv of dn along the vertical line (closed form)."""
    snp, cnp, dnp = jacobi_real(v, ctx.k_prime)
    k2 = ctx.k * ctx.k
    if m % 2 == 0:
        return k2 * snp / (cnp * cnp)
    return -ctx.k_prime * k2 * snp / (dnp * dnp)


def sn_vertical_sq(t: PhaseShift, ctx: EllipticContext) -> float:
    """sn^2(m*K + i*v, k): real on the lines, negative for even m."""
    snp, cnp, dnp = jacobi_real(t.v, ctx.k_prime)
    if t.m % 2 == 0:
        if abs(cnp) < 1e-300:
            raise EllipticOverflow(f"v={t.v!r} at the pole of the even line")
        return -(snp * snp) / (cnp * cnp)
    return 1.0 / (dnp * dnp)


# Table of interval real parts m: (pq ray, sigma < pi) -> m
_TABLE_M = {
    (PqClass.POS_REAL, True): 0,
    (PqClass.POS_REAL, False): 2,
    (PqClass.POS_IMAG, True): 1,
    (PqClass.POS_IMAG, False): 3,
    (PqClass.NEG_REAL, True): 2,
    (PqClass.NEG_REAL, False): 0,
}

_BISECT_STEPS = 80
_NEWTON_STEPS = 5
_INVERT_TOL = 1e-13


def invert_phase_shift(
    f: float,
    ctx: EllipticContext,
    pq_class: PqClass,
    sigma_below_pi: bool,
) -> PhaseShift:
    """Find t = m*K + i*v with dn(t) equal to sqrt(f) (M<1) or 1/sqrt(f) (M>1).

    The line m is selected by the (pq ray, sigma) table; v is found by
    bisection on the monotone restriction of dn, then Newton polish.  A target
    outside the range of dn on the selected line means the net is not
    equimodular elliptic; that is reported as PhaseShiftInconsistent.
    """
    if f <= 0.0:
        raise PhaseShiftInconsistent(f"amplitude product f={f!r} not positive")
    target = math.sqrt(f) if ctx.M < 1.0 else 1.0 / math.sqrt(f)
    m = _TABLE_M[(pq_class, sigma_below_pi)]
    kp = ctx.k_prime

    margin = 1e-12
    if m % 2 == 0:
        if target <= 1.0 + margin:
            raise PhaseShiftInconsistent(
                f"target dn={target!r} <= 1: no interior v on an even line"
            )
        increasing = True
    else:
        if not margin < target < kp * (1.0 - margin):
            raise PhaseShiftInconsistent(
                f"target dn={target!r} outside (0, k'={kp!r}) on an odd line"
            )
        increasing = False

    def value(v: float) -> float:
        return dn_vertical(PhaseShift(m=m, v=v), ctx)

    lo = ctx.K_prime * 1e-14
    hi = ctx.K_prime * (1.0 - 2.0 * _POLE_MARGIN)
    for _ in range(_BISECT_STEPS):
        mid = 0.5 * (lo + hi)
        below = value(mid) < target
        if below == increasing:
            lo = mid
        else:
            hi = mid
    v = 0.5 * (lo + hi)

    for _ in range(_NEWTON_STEPS):
        dv = _dn_vertical_derivative(m, v, ctx)
        if dv == 0.0:
            break
        step = (value(v) - target) / dv
        v_new = v - step
        if not 0.0 < v_new < ctx.K_prime:
            break
        v = v_new

    t = PhaseShift(m=m, v=v)
    if abs(dn_vertical(t, ctx) - target) > max(_INVERT_TOL, 1e-13 * abs(target)) * 10.0:
        raise PhaseShiftInconsistent(
            f"phase-shift inversion stalled: |dn - target| = "
            f"{abs(dn_vertical(t, ctx) - target)!r}"
        )
    return t


def lattice_generators(ctx: EllipticContext) -> tuple[complex, complex]:
    if ctx.lattice is LatticeKind.RECTANGULAR:
        return complex(4.0 * ctx.K, 0.0), complex(0.0, 2.0 * ctx.K_prime)
    return complex(4.0 * ctx.K, 0.0), complex(2.0 * ctx.K, 2.0 * ctx.K_prime)


def lattice_residual(s: complex, ctx: EllipticContext) -> float:
    """Distance from s to the nearest point of the period lattice."""
    g1, g2 = lattice_generators(ctx)
    # coordinates in the (g1, g2) basis; g1 is real
    b = s.imag / g2.imag
    a = (s.real - b * g2.real) / g1.real
    best = math.inf
    for mm in (math.floor(a) - 1, math.floor(a), math.floor(a) + 1, math.floor(a) + 2):
        for nn in (math.floor(b) - 1, math.floor(b), math.floor(b) + 1, math.floor(b) + 2):
            best = min(best, abs(s - (mm * g1 + nn * g2)))
    return best
