"""Quasi-symmetric nets and their closed-form flexion.

A QS-net is determined by three angles (alpha_1, beta_1, gamma_1) with
delta_1 = pi/2; the remaining vertices repeat or complement them:

    alpha_1 = alpha_4 = delta_2 = pi - delta_3
    beta_1  = beta_4  = gamma_2 = pi - gamma_3
    gamma_1 = gamma_4 = beta_2  = pi - beta_3
    delta_1 = delta_4 = alpha_2 = pi - alpha_3

Every elliptic QS-net flexes with cot(theta_2/2) = t as the parameter and the
remaining cot-halves rational in t up to a shared square root sqrt(D(t)).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .angles import NetAngles, VertexGermAngles, derive, is_elliptic, net_from_germs
from .errors import InvalidSeed, NegativeDiscriminant, NotElliptic, OutOfRange
from .kinematics import DihedralState, wrap_angle

_ENDPOINT_MARGIN = 1e-12


@dataclass(frozen=True)
class QsSeed:
    """Free angles of a quasi-symmetric net (radians); delta_1 = pi/2 implied."""

    alpha1: float
    beta1: float
    gamma1: float

    @staticmethod
    def from_degrees(alpha1: float, beta1: float, gamma1: float) -> "QsSeed":
        return QsSeed(*(math.radians(x) for x in (alpha1, beta1, gamma1)))


def build_qs_net(seed: QsSeed) -> NetAngles:
    """Assemble the four germs from a seed; validates the angle windows.

    The barred angles of vertex 1 must all lie in (0, pi) and every germ must
    be elliptic, otherwise the net is not a flexible QS-net.
    """
    a, b, g = seed.alpha1, seed.beta1, seed.gamma1
    d = 0.5 * math.pi
    for name, v in (("alpha1", a), ("beta1", b), ("gamma1", g)):
        if not 0.0 < v < math.pi:
            raise InvalidSeed(f"{name}={v!r} outside (0, pi)")

    sigma = 0.5 * (a + b + g + d)
    barred = {
        "alpha_bar": sigma - a,
        "beta_bar": sigma - b,
        "gamma_bar": sigma - g,
        "delta_bar": sigma - d,
    }
    for name, v in barred.items():
        if not 0.0 < v < math.pi:
            raise InvalidSeed(f"{name}={v!r} outside (0, pi)")

    germs = (
        VertexGermAngles(a, b, g, d),
        VertexGermAngles(d, g, b, a),
        VertexGermAngles(math.pi - d, math.pi - g, math.pi - b, math.pi - a),
        VertexGermAngles(a, b, g, d),
    )
    for i, germ in enumerate(germs, start=1):
        if not is_elliptic(germ):
            raise NotElliptic(f"QS germ at vertex {i} violates the elliptic condition")
    return net_from_germs(germs)


@dataclass(frozen=True)
class QsFlexion:
    """Closed-form flexion of a QS-net for one agreed square-root branch.

    cot(theta_1/2) = (-t sb +- sqrt(D)) / (dd1 + t^2 dd2)
    cot(theta_2/2) = t
    cot(theta_3/2) = (+t sb +- sqrt(D)) / (dd1 + t^2 dd2)
    cot(theta_4/2) = +- sqrt(D) / (d4a + t^2 d4b)
    D(t) = (p0 + p2 t^2) * (d4a + t^2 d4b)
    """

    seed: QsSeed
    net: NetAngles
    branch: int
    sb: float      # sin(beta_1)
    dd1: float     # sin(delta_bar) sin(alpha_bar - beta)
    dd2: float     # sin(alpha_bar) sin(delta_bar - beta)
    d4a: float     # sin(gamma_bar) sin(delta_bar)
    d4b: float     # sin(gamma_bar - beta) sin(delta_bar - beta)
    p0: float      # sin(sigma) sin(alpha_bar - beta)
    p2: float      # sin(alpha_bar) sin(beta_bar)
    s2: float      # amplitude s at vertex 2 (selects the valid-interval case)
    M: float
    valid_intervals: tuple[tuple[float, float], ...]

    def discriminant(self, t: float) -> float:
        return (self.p0 + self.p2 * t * t) * (self.d4a + self.d4b * t * t)

    def discriminant_factorized(self, t: float) -> float:
        """Same polynomial through the (1 - s2 + t^2) factorization."""
        q = derive(self.net.germ(1))
        pref = (math.sin(q.alpha_bar) * math.sin(q.beta_bar)
                * math.sin(q.gamma_bar) * math.sin(q.delta_bar))
        return pref * (1.0 - self.s2 + t * t) * ((1.0 - self.M) / (1.0 - self.s2) * t * t + 1.0)

    def contains(self, t: float) -> bool:
        for lo, hi in self.valid_intervals:
            above = t > lo + _ENDPOINT_MARGIN if math.isfinite(lo) else True
            below = t < hi - _ENDPOINT_MARGIN if math.isfinite(hi) else True
            if above and below:
                return True
        return False


def _valid_intervals(s2: float, M: float) -> tuple[tuple[float, float], ...]:
    inf = math.inf
    if s2 < 1.0 and M < 1.0:
        return ((-inf, inf),)
    if s2 > 1.0 and M < 1.0:
        return ((math.sqrt(s2 - 1.0), math.sqrt((s2 - 1.0) / (1.0 - M))),)
    if s2 > 1.0 and M > 1.0:
        return ((math.sqrt(s2 - 1.0), inf),)
    return ((0.0, math.sqrt((1.0 - s2) / (M - 1.0))),)


def qs_flexion(net: NetAngles, branch: int) -> QsFlexion:
    """Flexion coefficients for a QS-net; ``branch`` is the agreed +-1 sign."""
    if branch not in (-1, 1):
        raise ValueError("branch must be +1 or -1")
    g1 = net.germ(1)
    seed = QsSeed(g1.alpha, g1.beta, g1.gamma)
    if abs(g1.delta - 0.5 * math.pi) > 1e-12:
        raise InvalidSeed("not a QS-net: delta_1 != pi/2")

    q1 = derive(g1)
    q2 = derive(net.germ(2))
    b = g1.beta
    fl = QsFlexion(
        seed=seed,
        net=net,
        branch=branch,
        sb=math.sin(b),
        dd1=math.sin(q1.delta_bar) * math.sin(q1.alpha_bar - b),
        dd2=math.sin(q1.alpha_bar) * math.sin(q1.delta_bar - b),
        d4a=math.sin(q1.gamma_bar) * math.sin(q1.delta_bar),
        d4b=math.sin(q1.gamma_bar - b) * math.sin(q1.delta_bar - b),
        p0=math.sin(q1.sigma) * math.sin(q1.alpha_bar - b),
        p2=math.sin(q1.alpha_bar) * math.sin(q1.beta_bar),
        s2=q2.s,
        M=q1.M,
        valid_intervals=_valid_intervals(q2.s, q1.M),
    )
    return fl


def eval_cot_halves(fl: QsFlexion, t: float) -> tuple[float, float, float, float]:
    """The four cot(theta_i/2) values; raises outside the valid intervals."""
    if not fl.contains(t):
        raise OutOfRange(f"t={t!r} outside the valid intervals {fl.valid_intervals!r}")
    D = fl.discriminant(t)
    if D < 0.0:
        raise NegativeDiscriminant(f"D({t!r}) = {D!r} < 0")
    root = fl.branch * math.sqrt(D)
    den13 = fl.dd1 + t * t * fl.dd2
    den4 = fl.d4a + t * t * fl.d4b
    if den13 == 0.0 or den4 == 0.0:
        raise OutOfRange(f"denominator vanishes at t={t!r}")
    w1 = (-t * fl.sb + root) / den13
    w3 = (t * fl.sb + root) / den13
    w4 = root / den4
    return (w1, t, w3, w4)


def eval_flexion(fl: QsFlexion, t: float) -> DihedralState:
    """Dihedral state at flexion parameter t, each angle in (-pi, pi].

    cot(theta/2) = num/den is inverted through theta = 2*atan2(den, num), so
    vanishing denominators map smoothly to theta -> 0 (still rejected as
    outside the state space by the caller if exactly zero).
    """
    if not fl.contains(t):
        raise OutOfRange(f"t={t!r} outside the valid intervals {fl.valid_intervals!r}")
    D = fl.discriminant(t)
    if D < 0.0:
        raise NegativeDiscriminant(f"D({t!r}) = {D!r} < 0")
    root = fl.branch * math.sqrt(D)
    den13 = fl.dd1 + t * t * fl.dd2
    den4 = fl.d4a + t * t * fl.d4b
    th1 = 2.0 * math.atan2(den13, -t * fl.sb + root)
    th2 = 2.0 * math.atan2(1.0, t)
    th3 = 2.0 * math.atan2(den13, t * fl.sb + root)
    th4 = 2.0 * math.atan2(den4, root)
    return DihedralState(tuple(wrap_angle(x) for x in (th1, th2, th3, th4)))


def sample_parameters(fl: QsFlexion, n: int, margin: float = 0.02) -> list[float]:
    """n parameter values spread over the first valid interval.

    Unbounded intervals are sampled through the t = tan(phi) substitution so
    the samples accumulate sensibly instead of running to infinity.
    """
    lo, hi = fl.valid_intervals[0]
    if math.isinf(lo) and math.isinf(hi):
        phis = [(-0.5 + (i + 0.5) / n) * math.pi * (1.0 - margin) for i in range(n)]
        return [math.tan(p) for p in phis]
    if math.isinf(hi):
        phi_lo = math.atan(lo)
        phis = [phi_lo + (0.5 * math.pi - phi_lo) * (i + 0.5) / n * (1.0 - margin)
                for i in range(n)]
        return [math.tan(p) for p in phis]
    span = hi - lo
    pad = span * margin
    return [lo + pad + (span - 2.0 * pad) * i / max(n - 1, 1) for i in range(n)]
