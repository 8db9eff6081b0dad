"""Equimodular elliptic classification and the numeric exclusivity heuristics.

A net is of equimodular elliptic type when (1) every vertex is elliptic,
(2) the four moduli M_i agree, (3) the amplitudes at shared edges match
(r_1 = r_2, s_1 = s_4, r_3 = r_4, s_2 = s_3) and (4) the signed sum of the
four phase shifts t_1 + e_1 t_2 + e_2 t_3 + e_3 t_4 lands on the period
lattice for some signs e_j.

The exclusivity report applies the paper-free numeric screens for the other
classes a flexible net could fall into (orthodiagonal, conjugate-modular,
trivial, linear compound), over all 16 boundary-strip switch combinations.
They are heuristics: a flag only certifies that the class was ruled out
numerically at the given tolerance.
"""
from __future__ import annotations

import math
import statistics
from dataclasses import dataclass
from enum import Enum
from itertools import product
from typing import Optional, Sequence

from .angles import (
    NetAngles,
    VertexGermAngles,
    derive,
    is_elliptic,
    net_from_germs,
)
from .elliptic import EllipticContext, PhaseShift, invert_phase_shift, lattice_residual
from .errors import NotElliptic, PhaseShiftInconsistent
from .kinematics import DihedralState, wrap_angle

DEFAULT_TOL = 1e-9          # closed-form inputs
PUBLISHED_DIGITS_TOL = 1e-6  # inputs typed from truncated published decimals


@dataclass(frozen=True)
class ClassificationReport:
    elliptic: bool
    moduli_equal: bool
    moduli_max_deviation: float
    amplitudes_match: bool
    amplitudes_max_deviation: float
    phase_shifts: Optional[tuple[PhaseShift, PhaseShift, PhaseShift, PhaseShift]]
    period_signs: Optional[tuple[int, int, int]]
    period_residual: float
    verdict: bool
    modulus: Optional[float] = None
    failure: str = ""

    def to_json_dict(self) -> dict:
        return {
            "elliptic": self.elliptic,
            "moduli_equal": self.moduli_equal,
            "moduli_max_deviation": self.moduli_max_deviation,
            "amplitudes_match": self.amplitudes_match,
            "amplitudes_max_deviation": self.amplitudes_max_deviation,
            "phase_shifts": (
                None if self.phase_shifts is None
                else [{"m": t.m, "v": t.v} for t in self.phase_shifts]
            ),
            "period_signs": None if self.period_signs is None else list(self.period_signs),
            "period_residual": self.period_residual,
            "verdict": self.verdict,
            "modulus": self.modulus,
            "failure": self.failure,
        }


def _failed(elliptic: bool, failure: str, **kw) -> ClassificationReport:
    base = dict(
        elliptic=elliptic,
        moduli_equal=False, moduli_max_deviation=math.inf,
        amplitudes_match=False, amplitudes_max_deviation=math.inf,
        phase_shifts=None, period_signs=None, period_residual=math.inf,
        verdict=False, failure=failure,
    )
    base.update(kw)
    return ClassificationReport(**base)


def classify(net: NetAngles, tol: float = DEFAULT_TOL) -> ClassificationReport:
    """Test the three equimodular elliptic conditions at tolerance ``tol``."""
    if not all(is_elliptic(g) for g in net.vertices):
        return _failed(False, "NotElliptic: some vertex violates the elliptic condition")
    try:
        qs = [derive(g) for g in net.vertices]
    except NotElliptic as exc:
        return _failed(False, f"NotElliptic: {exc}")

    Ms = [q.M for q in qs]
    moduli_dev = max(Ms) - min(Ms)
    moduli_equal = moduli_dev <= tol

    amp_pairs = (
        (qs[0].r, qs[1].r),   # r1 = r2
        (qs[0].s, qs[3].s),   # s1 = s4
        (qs[2].r, qs[3].r),   # r3 = r4
        (qs[1].s, qs[2].s),   # s2 = s3
    )
    amp_dev = max(abs(a - b) for a, b in amp_pairs)
    amplitudes_match = amp_dev <= tol

    if not (moduli_equal and amplitudes_match):
        return _failed(
            True, "moduli or amplitudes do not match",
            moduli_equal=moduli_equal, moduli_max_deviation=moduli_dev,
            amplitudes_match=amplitudes_match, amplitudes_max_deviation=amp_dev,
            modulus=sum(Ms) / 4.0,
        )

    M = sum(Ms) / 4.0
    if M <= 0.0 or abs(M - 1.0) <= tol:
        return _failed(
            True, f"common modulus M={M!r} outside the elliptic regime",
            moduli_equal=moduli_equal, moduli_max_deviation=moduli_dev,
            amplitudes_match=amplitudes_match, amplitudes_max_deviation=amp_dev,
            modulus=M,
        )

    ctx = EllipticContext.from_modulus(M)
    shifts = []
    for i, q in enumerate(qs, start=1):
        try:
            shifts.append(
                invert_phase_shift(q.f, ctx, q.pq_class(), sigma_below_pi=q.sigma < math.pi)
            )
        except PhaseShiftInconsistent as exc:
            return _failed(
                True, f"PhaseShiftInconsistent at vertex {i}: {exc}",
                moduli_equal=True, moduli_max_deviation=moduli_dev,
                amplitudes_match=True, amplitudes_max_deviation=amp_dev,
                modulus=M,
            )

    t = [ps.as_complex(ctx) for ps in shifts]
    best_res, best_signs = math.inf, None
    for e1, e2, e3 in product((1, -1), repeat=3):
        res = lattice_residual(t[0] + e1 * t[1] + e2 * t[2] + e3 * t[3], ctx)
        if res < best_res:
            best_res, best_signs = res, (e1, e2, e3)

    verdict = best_res <= tol
    return ClassificationReport(
        elliptic=True,
        moduli_equal=True, moduli_max_deviation=moduli_dev,
        amplitudes_match=True, amplitudes_max_deviation=amp_dev,
        phase_shifts=tuple(shifts),
        period_signs=best_signs if verdict else None,
        period_residual=best_res,
        verdict=verdict,
        modulus=M,
        failure="" if verdict else "period condition fails for every sign choice",
    )


class StripSide(Enum):
    """Boundary strips named by the central-quad edge they sit on.

    RIGHT is the strip on edge A4A1 (dihedral theta_4), with the
    (beta_1, beta_4, gamma_1, gamma_4) switch quadruple; the other three
    follow the same vertex/edge symmetry.  TOP sits on edge A1A2 (theta_1),
    LEFT on A2A3 (theta_2), BOTTOM on A3A4 (theta_3).
    """

    TOP = "top"
    LEFT = "left"
    BOTTOM = "bottom"
    RIGHT = "right"


# per strip: (dihedral index, ((vertex, angle name), ...) complemented quadruple)
_STRIP_DATA = {
    StripSide.TOP: (1, ((1, "alpha"), (2, "alpha"), (1, "beta"), (2, "beta"))),
    StripSide.LEFT: (2, ((2, "gamma"), (3, "gamma"), (2, "beta"), (3, "beta"))),
    StripSide.BOTTOM: (3, ((3, "alpha"), (4, "alpha"), (3, "beta"), (4, "beta"))),
    StripSide.RIGHT: (4, ((1, "gamma"), (4, "gamma"), (1, "beta"), (4, "beta"))),
}


def strip_dihedral_index(which: StripSide) -> int:
    """Index of the dihedral angle shifted by pi when the strip is switched."""
    return _STRIP_DATA[which][0]


def switch_strip(net: NetAngles, which: StripSide) -> NetAngles:
    """Complement the strip's flat-angle quadruple (an involution).

    Only flat angles are touched; callers tracking dihedral states apply the
    matching theta_j -> theta_j - pi shift themselves.
    """
    _, quadruple = _STRIP_DATA[which]
    values = {i: dict(zip(("alpha", "beta", "gamma", "delta"), net.germ(i).as_tuple()))
              for i in range(1, 5)}
    for vertex, name in quadruple:
        values[vertex][name] = math.pi - values[vertex][name]
    return net_from_germs(VertexGermAngles(**values[i]) for i in range(1, 5))


def switch_state(state: DihedralState, strips: Sequence[StripSide]) -> DihedralState:
    """Dihedral state of the switched net: theta_j -> theta_j - pi per strip."""
    theta = list(state.theta)
    for which in strips:
        j = strip_dihedral_index(which)
        theta[j - 1] = wrap_angle(theta[j - 1] - math.pi)
    return DihedralState(tuple(theta))


@dataclass(frozen=True)
class ExclusivityTolerances:
    rule_out_margin: float = 1e-6       # a relation must fail by more than this
    dihedral_variation: float = 1e-6    # theta span below this counts as fixed
    constancy_rel_std: float = 1e-8     # rel. std below this counts as constant


@dataclass(frozen=True)
class ExclusivityReport:
    orthodiagonal_ruled_out: bool
    conjugate_modular_ruled_out: bool
    trivial_ruled_out: bool
    linear_compound_ruled_out: bool
    strip_variants_checked: int = 16

    def all_other_classes_ruled_out(self) -> bool:
        return (self.orthodiagonal_ruled_out and self.conjugate_modular_ruled_out
                and self.trivial_ruled_out and self.linear_compound_ruled_out)


def _rel_std(values: Sequence[float]) -> float:
    mean = statistics.fmean(values)
    scale = max(abs(v) for v in values)
    if scale == 0.0:
        return 0.0
    var = statistics.fmean((v - mean) ** 2 for v in values)
    return math.sqrt(var) / scale


def exclusivity(
    net: NetAngles,
    flexion_samples: Sequence[DihedralState],
    tol: ExclusivityTolerances = ExclusivityTolerances(),
) -> ExclusivityReport:
    """Numeric rule-out of the other candidate classes, over 16 strip variants."""
    if len(flexion_samples) < 8:
        raise ValueError("need at least 8 distinct flexion samples")

    ortho_all = conj_all = trivial_all = linear_all = True
    sides = (StripSide.TOP, StripSide.LEFT, StripSide.BOTTOM, StripSide.RIGHT)
    for mask in product((False, True), repeat=4):
        strips = [s for s, on in zip(sides, mask) if on]
        variant = net
        for s in strips:
            variant = switch_strip(variant, s)
        samples = [switch_state(st, strips) for st in flexion_samples]

        # orthodiagonal: needs cos(alpha) cos(gamma) = cos(beta) cos(delta) everywhere
        ortho_fails = any(
            abs(math.cos(g.alpha) * math.cos(g.gamma) - math.cos(g.beta) * math.cos(g.delta))
            > tol.rule_out_margin
            for g in variant.vertices
        )
        ortho_all = ortho_all and ortho_fails

        # conjugate-modular: needs 1/M_i + 1/M_{i+1} = 1 around the net
        Ms = [derive(g).M for g in variant.vertices]
        conj_fails = any(
            abs(1.0 / Ms[i] + 1.0 / Ms[(i + 1) % 4] - 1.0) > tol.rule_out_margin
            for i in range(4)
        )
        conj_all = conj_all and conj_fails

        # trivial: needs some dihedral angle fixed along the flexion
        spans = [
            max(st.get(i) for st in samples) - min(st.get(i) for st in samples)
            for i in range(1, 5)
        ]
        trivial_fails = all(sp > tol.dihedral_variation for sp in spans)
        trivial_all = trivial_all and trivial_fails

        # linear compound: needs cot(t1/2)/cot(t3/2) or the product constant
        w1 = [st.cot_half(1) for st in samples]
        w2 = [st.cot_half(3) for st in samples]
        ratios = [a / b for a, b in zip(w1, w2)]
        products = [a * b for a, b in zip(w1, w2)]
        linear_fails = (_rel_std(ratios) > tol.constancy_rel_std
                        and _rel_std(products) > tol.constancy_rel_std)
        linear_all = linear_all and linear_fails

    return ExclusivityReport(
        orthodiagonal_ruled_out=ortho_all,
        conjugate_modular_ruled_out=conj_all,
        trivial_ruled_out=trivial_all,
        linear_compound_ruled_out=linear_all,
    )
