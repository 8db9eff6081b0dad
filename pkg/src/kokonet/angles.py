"""Flat-angle domain types and the per-vertex sine-ratio algebra.

Every interior vertex of a 3x3 net carries four flat angles (alpha, beta,
gamma, delta), all in (0, pi).  From them we derive the half-sum sigma, the
barred angles, the sine ratios a, b, c, d and their pairwise products
r = a*d, s = c*d, f = a*c and the modulus M = a*b*c*d.  These quantities
drive everything else: ellipticity, admissibility, classification and the
phase-shift machinery.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable

from .errors import NotElliptic

TWO_PI = 2.0 * math.pi

# Below this distance (radians, mod 2*pi) a signed angle sum counts as zero
# and the germ is rejected as degenerate.
ELLIPTIC_TOL = 1e-9


def wrap_to_zero(x: float) -> float:
    """Distance from x to the nearest multiple of 2*pi."""
    r = math.fmod(x, TWO_PI)
    if r < 0.0:
        r += TWO_PI
    return min(r, TWO_PI - r)


@dataclass(frozen=True)
class VertexGermAngles:
    """The four flat angles meeting at one interior vertex, in radians."""

    alpha: float
    beta: float
    gamma: float
    delta: float

    def __post_init__(self):
        for name in ("alpha", "beta", "gamma", "delta"):
            v = getattr(self, name)
            if not 0.0 < v < math.pi:
                raise ValueError(f"{name}={v!r} outside the open interval (0, pi)")

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.alpha, self.beta, self.gamma, self.delta)

    @staticmethod
    def from_degrees(alpha: float, beta: float, gamma: float, delta: float) -> "VertexGermAngles":
        return VertexGermAngles(*(math.radians(x) for x in (alpha, beta, gamma, delta)))


@dataclass(frozen=True)
class NetAngles:
    """Flat angles of the full 3x3 net: one germ per interior vertex, i=1..4."""

    vertices: tuple[VertexGermAngles, VertexGermAngles, VertexGermAngles, VertexGermAngles]

    def __post_init__(self):
        if len(self.vertices) != 4:
            raise ValueError("a net has exactly four interior vertices")
        # A grossly wrong delta sum means the central quad cannot close; the
        # realizability gates in kinematics/geometry use tighter tolerances.
        if abs(self.delta_sum() - TWO_PI) > 1e-6:
            raise ValueError(
                f"delta angles sum to {self.delta_sum()!r}, expected 2*pi"
            )

    def germ(self, i: int) -> VertexGermAngles:
        """Vertex germ by 1-based index."""
        return self.vertices[i - 1]

    def delta_sum(self) -> float:
        return sum(v.delta for v in self.vertices)

    def alphas(self) -> tuple[float, ...]:
        return tuple(v.alpha for v in self.vertices)

    def betas(self) -> tuple[float, ...]:
        return tuple(v.beta for v in self.vertices)

    def gammas(self) -> tuple[float, ...]:
        return tuple(v.gamma for v in self.vertices)

    def deltas(self) -> tuple[float, ...]:
        return tuple(v.delta for v in self.vertices)


def net_from_germs(germs: Iterable[VertexGermAngles]) -> NetAngles:
    g = tuple(germs)
    return NetAngles(vertices=(g[0], g[1], g[2], g[3]))


class PqClass(Enum):
    """Ray of the amplitude product p*q: both real, one imaginary, or both imaginary."""

    POS_REAL = "pos_real"      # r > 1 and s > 1
    POS_IMAG = "pos_imag"      # exactly one of r, s below 1
    NEG_REAL = "neg_real"      # r < 1 and s < 1


@dataclass(frozen=True)
class Amplitude:
    """Square root of (r - 1) or (s - 1): a positive real or positive imaginary."""

    magnitude: float
    imaginary: bool

    def as_complex(self) -> complex:
        return complex(0.0, self.magnitude) if self.imaginary else complex(self.magnitude, 0.0)


@dataclass(frozen=True)
class DerivedVertexQuantities:
    """Everything the sine-ratio algebra produces at one vertex."""

    sigma: float
    alpha_bar: float
    beta_bar: float
    gamma_bar: float
    delta_bar: float
    epsilon: int
    a: float
    b: float
    c: float
    d: float
    M: float
    r: float
    s: float
    f: float
    u: float
    x: float
    y: float
    z: float
    p: Amplitude
    q: Amplitude

    def pq_class(self) -> PqClass:
        if self.p.imaginary and self.q.imaginary:
            return PqClass.NEG_REAL
        if self.p.imaginary or self.q.imaginary:
            return PqClass.POS_IMAG
        return PqClass.POS_REAL


def is_elliptic(germ: VertexGermAngles, tol: float = ELLIPTIC_TOL) -> bool:
    """True iff no signed sum alpha +- beta +- gamma +- delta is 0 mod 2*pi.

    The leading sign on alpha is fixed to +; the remaining eight sign
    combinations are enumerated.
    """
    a, b, g, d = germ.as_tuple()
    for sb in (1.0, -1.0):
        for sg in (1.0, -1.0):
            for sd in (1.0, -1.0):
                if wrap_to_zero(a + sb * b + sg * g + sd * d) <= tol:
                    return False
    return True


def _failing_sign_combination(germ: VertexGermAngles, tol: float) -> str:
    a, b, g, d = germ.as_tuple()
    for sb in (1, -1):
        for sg in (1, -1):
            for sd in (1, -1):
                if wrap_to_zero(a + sb * b + sg * g + sd * d) <= tol:
                    def pm(s):
                        return "+" if s > 0 else "-"
                    return f"alpha {pm(sb)} beta {pm(sg)} gamma {pm(sd)} delta = 0 (mod 2*pi)"
    return "none"


def derive(germ: VertexGermAngles, tol: float = ELLIPTIC_TOL) -> DerivedVertexQuantities:
    """Derived quantities at a vertex; raises NotElliptic on degenerate germs."""
    if not is_elliptic(germ, tol):
        raise NotElliptic(_failing_sign_combination(germ, tol))

    a_, b_, g_, d_ = germ.as_tuple()
    sigma = 0.5 * (a_ + b_ + g_ + d_)
    ab, bb, gb, db = sigma - a_, sigma - b_, sigma - g_, sigma - d_

    a = math.sin(a_) / math.sin(ab)
    b = math.sin(b_) / math.sin(bb)
    c = math.sin(g_) / math.sin(gb)
    d = math.sin(d_) / math.sin(db)

    M = a * b * c * d
    r, s, f = a * d, c * d, a * c
    epsilon = 1 if math.sin(sigma) > 0.0 else -1

    def amp(w: float) -> Amplitude:
        return Amplitude(math.sqrt(abs(w)), imaginary=w < 0.0)

    return DerivedVertexQuantities(
        sigma=sigma,
        alpha_bar=ab, beta_bar=bb, gamma_bar=gb, delta_bar=db,
        epsilon=epsilon,
        a=a, b=b, c=c, d=d,
        M=M, r=r, s=s, f=f,
        u=1.0 - M,
        x=1.0 / (r - 1.0), y=1.0 / (s - 1.0), z=1.0 / (f - 1.0),
        p=amp(r - 1.0), q=amp(s - 1.0),
    )


def lemma31_residuals(germ: VertexGermAngles) -> tuple[float, ...]:
    """|LHS - RHS| for the seven sine-product identities; test oracle only.

    The identities express 1-ab, 1-bc, 1-bd, cd-1, ad-1, ac-1, 1-M through
    products of sines of sigma, the barred angles and the barred-minus-beta
    differences.
    """
    a_, b_, g_, d_ = germ.as_tuple()
    sigma = 0.5 * (a_ + b_ + g_ + d_)
    ab, bb, gb, db = sigma - a_, sigma - b_, sigma - g_, sigma - d_
    sab, sbb, sgb, sdb = (math.sin(x) for x in (ab, bb, gb, db))
    ss = math.sin(sigma)

    a = math.sin(a_) / sab
    b = math.sin(b_) / sbb
    c = math.sin(g_) / sgb
    d = math.sin(d_) / sdb

    lhs_rhs = (
        (1.0 - a * b, ss * math.sin(ab - b_) / (sab * sbb)),
        (1.0 - b * c, ss * math.sin(gb - b_) / (sbb * sgb)),
        (1.0 - b * d, ss * math.sin(db - b_) / (sbb * sdb)),
        (c * d - 1.0, ss * math.sin(ab - b_) / (sgb * sdb)),
        (a * d - 1.0, ss * math.sin(gb - b_) / (sab * sdb)),
        (a * c - 1.0, ss * math.sin(db - b_) / (sab * sgb)),
        (1.0 - a * b * c * d,
         ss * math.sin(ab - b_) * math.sin(gb - b_) * math.sin(db - b_) / (sab * sbb * sgb * sdb)),
    )
    return tuple(abs(lhs - rhs) for lhs, rhs in lhs_rhs)


def complement(germ: VertexGermAngles) -> VertexGermAngles:
    """Replace every flat angle by its complement to pi (an involution)."""
    return VertexGermAngles(
        math.pi - germ.alpha, math.pi - germ.beta,
        math.pi - germ.gamma, math.pi - germ.delta,
    )


def complement_net(net: NetAngles) -> NetAngles:
    return net_from_germs(complement(g) for g in net.vertices)


def admissible(q: DerivedVertexQuantities) -> bool:
    """Sign inequalities a realizable vertex with M > 0 must satisfy."""
    r, s, f, M = q.r, q.s, q.f, q.M
    return (
        r > 0.0 and s > 0.0 and f > 0.0
        and (r - 1.0) * (r - M) > 0.0
        and (s - 1.0) * (s - M) > 0.0
        and (f - 1.0) * (f - M) > 0.0
        and (r - 1.0) * (s - 1.0) * (f - 1.0) * (1.0 - M) > 0.0
    )
