"""Vertex-transfer kinematics of the 3x3 net.

Vertex i couples the dihedral angles theta_{i-1} and theta_i of its two
incident inner edges through the spherical-linkage relation

    cos(beta) = P(xi) + Q(xi) cos(eta) + R(xi) sin(eta),

    P = cos(alpha) cos(gamma) cos(delta) + cos(xi) sin(alpha) cos(gamma) sin(delta)
    Q = sin(gamma) (cos(alpha) sin(delta) - cos(xi) sin(alpha) cos(delta))
    R = sin(alpha) sin(gamma) sin(xi)

where xi is the dihedral on the alpha-side edge and eta the one on the
gamma-side edge.  At odd vertices (1, 3) the alpha side carries theta_i, at
even vertices (2, 4) it carries theta_{i-1}; swapping alpha with gamma turns
the equation into the one solved for xi given eta, so the chain can be
propagated in either direction.

Chaining the relation around vertices 2 -> 3 -> 4 -> 1 realizes the coupling
of all four dihedral angles; a state lies on the configuration space exactly
when the chain closes back onto the starting angle.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Sequence

import numpy as np

from .angles import (
    NetAngles,
    VertexGermAngles,
    derive,
    net_from_germs,
)
from .errors import NonRealAngles, PropagationDead

TWO_PI = 2.0 * math.pi


def wrap_angle(x: float) -> float:
    """Map to the principal interval (-pi, pi]."""
    r = math.fmod(x, TWO_PI)
    if r <= -math.pi:
        r += TWO_PI
    elif r > math.pi:
        r -= TWO_PI
    return r


def angle_distance(x: float, y: float) -> float:
    """Wraparound distance on the circle."""
    d = math.fmod(abs(x - y), TWO_PI)
    return min(d, TWO_PI - d)


@dataclass(frozen=True)
class DihedralState:
    """Oriented dihedral angles theta_1..theta_4, each in (-pi, pi]."""

    theta: tuple[float, float, float, float]

    def __post_init__(self):
        object.__setattr__(self, "theta", tuple(wrap_angle(t) for t in self.theta))

    def get(self, i: int) -> float:
        """theta_i with theta_0 aliased to theta_4 (1-based, i may be 0)."""
        return self.theta[(i - 1) % 4]

    def cot_half(self, i: int) -> float:
        t = self.get(i)
        return math.cos(0.5 * t) / math.sin(0.5 * t)

    def distance(self, other: "DihedralState") -> float:
        return max(angle_distance(a, b) for a, b in zip(self.theta, other.theta))

    @staticmethod
    def from_cot_half(w: Sequence[float]) -> "DihedralState":
        return DihedralState(tuple(wrap_angle(2.0 * math.atan2(1.0, wi)) for wi in w))


class Parity(Enum):
    """Vertex-index parity: odd vertices are 1 and 3, even vertices 2 and 4."""

    ODD = "odd"
    EVEN = "even"


def parity_of(i: int) -> Parity:
    return Parity.ODD if i % 2 == 1 else Parity.EVEN


def _solve_cos_sin(a: float, b: float, c: float) -> tuple[float, ...]:
    """All eta in (-pi, pi] with a*cos(eta) + b*sin(eta) = c, ascending."""
    rr = math.hypot(a, b)
    if rr < abs(c):
        return ()
    if rr == 0.0:
        # degenerate: either no constraint (c == 0) or inconsistent
        return ()
    phi = math.atan2(b, a)
    psi = math.acos(max(-1.0, min(1.0, c / rr)))
    sols = {wrap_angle(phi - psi), wrap_angle(phi + psi)}
    return tuple(sorted(sols))


def _transfer_alpha_to_gamma(germ: VertexGermAngles, xi: float) -> tuple[float, ...]:
    a, b, g, d = germ.as_tuple()
    P = math.cos(a) * math.cos(g) * math.cos(d) + math.cos(xi) * math.sin(a) * math.cos(g) * math.sin(d)
    Q = math.sin(g) * (math.cos(a) * math.sin(d) - math.cos(xi) * math.sin(a) * math.cos(d))
    R = math.sin(a) * math.sin(g) * math.sin(xi)
    return _solve_cos_sin(Q, R, math.cos(b) - P)


def vertex_transfer(germ: VertexGermAngles, known: float, parity: Parity) -> tuple[float, ...]:
    """Solutions for the unknown dihedral at a vertex, given the other one.

    ``known`` is theta_{i-1} when walking the chain forward.  At even vertices
    that angle sits on the alpha side (it is xi) and the equation is solved
    for eta = theta_i; at odd vertices it sits on the gamma side, which is the
    same equation with alpha and gamma exchanged.  Zero, one or two solutions
    in (-pi, pi], ascending.
    """
    if parity is Parity.EVEN:
        return _transfer_alpha_to_gamma(germ, known)
    swapped = VertexGermAngles(germ.gamma, germ.beta, germ.alpha, germ.delta)
    return _transfer_alpha_to_gamma(swapped, known)


def _pick(solutions: tuple[float, ...], choice: int, vertex: int) -> float:
    if not solutions:
        raise PropagationDead(vertex)
    if choice < 0:
        return solutions[0]
    return solutions[-1]


def propagate(
    net: NetAngles,
    theta1: float,
    branch_choices: Sequence[int] = (-1, -1, -1, -1),
) -> tuple[DihedralState, float]:
    """Chain the transfer around vertices 2 -> 3 -> 4 -> 1 starting at theta_1.

    ``branch_choices`` picks the lower (-1) or upper (+1) transfer solution at
    vertices 2, 3, 4 and at the final closure vertex 1.  The returned residual
    is the wraparound distance between the propagated theta_1 and the input;
    a small residual certifies that the state lies on the configuration space.
    """
    th1 = wrap_angle(theta1)
    th2 = _pick(vertex_transfer(net.germ(2), th1, Parity.EVEN), branch_choices[0], 2)
    th3 = _pick(vertex_transfer(net.germ(3), th2, Parity.ODD), branch_choices[1], 3)
    th4 = _pick(vertex_transfer(net.germ(4), th3, Parity.EVEN), branch_choices[2], 4)
    th1_back = _pick(vertex_transfer(net.germ(1), th4, Parity.ODD), branch_choices[3], 1)
    state = DihedralState((th1, th2, th3, th4))
    return state, angle_distance(th1_back, th1)


def propagate_best(
    net: NetAngles, theta1: float
) -> tuple[DihedralState, float, tuple[int, int, int, int]]:
    """Propagate over all 16 branch choices and keep the best-closing state."""
    best: Optional[tuple[DihedralState, float, tuple[int, int, int, int]]] = None
    for c0 in (-1, 1):
        for c1 in (-1, 1):
            for c2 in (-1, 1):
                for c3 in (-1, 1):
                    choices = (c0, c1, c2, c3)
                    try:
                        state, res = propagate(net, theta1, choices)
                    except PropagationDead:
                        continue
                    if best is None or res < best[1]:
                        best = (state, res, choices)
    if best is None:
        raise PropagationDead(2, "no transfer solution on any branch")
    return best


def propagate_near(
    net: NetAngles, theta1: float, reference: DihedralState
) -> tuple[DihedralState, float]:
    """Propagate picking, at each vertex, the solution nearest the reference."""
    th1 = wrap_angle(theta1)

    def nearest(sols: tuple[float, ...], ref: float, vertex: int) -> float:
        if not sols:
            raise PropagationDead(vertex)
        return min(sols, key=lambda s: angle_distance(s, ref))

    th2 = nearest(vertex_transfer(net.germ(2), th1, Parity.EVEN), reference.get(2), 2)
    th3 = nearest(vertex_transfer(net.germ(3), th2, Parity.ODD), reference.get(3), 3)
    th4 = nearest(vertex_transfer(net.germ(4), th3, Parity.EVEN), reference.get(4), 4)
    th1_back = nearest(vertex_transfer(net.germ(1), th4, Parity.ODD), th1, 1)
    return DihedralState((th1, th2, th3, th4)), angle_distance(th1_back, th1)


@dataclass
class FlexionTrace:
    """Continuation result: (t, state) samples plus an optional death report."""

    samples: list[tuple[float, DihedralState]] = field(default_factory=list)
    died_at: Optional[float] = None
    reason: str = ""

    def states(self) -> list[DihedralState]:
        return [s for _, s in self.samples]


def transfer_equation_residuals(net: NetAngles, state: DihedralState) -> tuple[float, ...]:
    """The four vertex-coupling equation residuals cos(beta) - e1.e2.

    Unlike the angular closure distance these stay well-conditioned near
    folds of the configuration curve, where two transfer roots coalesce.
    """
    out = []
    for i in range(1, 5):
        g = net.germ(i)
        if i % 2 == 1:
            xi, eta = state.get(i), state.get(i - 1)
        else:
            xi, eta = state.get(i - 1), state.get(i)
        a, b, gm, d = g.as_tuple()
        P = math.cos(a) * math.cos(gm) * math.cos(d) \
            + math.cos(xi) * math.sin(a) * math.cos(gm) * math.sin(d)
        Q = math.sin(gm) * (math.cos(a) * math.sin(d) - math.cos(xi) * math.sin(a) * math.cos(d))
        R = math.sin(a) * math.sin(gm) * math.sin(xi)
        out.append(math.cos(b) - (P + Q * math.cos(eta) + R * math.sin(eta)))
    return tuple(out)


def polish_state(
    net: NetAngles, state: DihedralState, iters: int = 6
) -> tuple[DihedralState, float]:
    """Gauss-Newton refinement of (theta_2, theta_3, theta_4) at fixed theta_1.

    Returns the refined state and the worst coupling-equation residual; the
    chain estimate it starts from may carry sqrt(eps) errors near folds,
    which this reduces back to machine precision when the state is genuine.
    """
    th = list(state.theta)

    def residuals(v):
        s = DihedralState((th[0], v[0], v[1], v[2]))
        return np.array(transfer_equation_residuals(net, s))

    v = np.array(th[1:])
    r = residuals(v)
    for _ in range(iters):
        if float(np.max(np.abs(r))) < 1e-14:
            break
        J = np.empty((4, 3))
        for j in range(3):
            h = 1e-7
            vp, vm = v.copy(), v.copy()
            vp[j] += h
            vm[j] -= h
            J[:, j] = (residuals(vp) - residuals(vm)) / (2.0 * h)
        step, *_ = np.linalg.lstsq(J, r, rcond=None)
        v_new = v - step
        r_new = residuals(v_new)
        if float(np.max(np.abs(r_new))) >= float(np.max(np.abs(r))):
            break
        v, r = v_new, r_new
    refined = DihedralState((th[0], float(v[0]), float(v[1]), float(v[2])))
    return refined, float(np.max(np.abs(r)))


class _BranchDead(Exception):
    def __init__(self, reason: str):
        self.reason = reason


def _continue_to(
    net: NetAngles,
    prev: DihedralState,
    theta1_target: float,
    closure_tol: float,
    max_jump: float,
    depth: int = 20,
) -> DihedralState:
    """Walk the branch from ``prev`` to a target theta_1, bisecting the step
    whenever the chain stops closing or the state jumps too far (which is the
    signature of a silent branch switch).

    Accepted states are polished on the coupling equations: near folds the
    raw chain carries sqrt(eps) errors that the angular closure test would
    otherwise misread as branch death.
    """
    try:
        state, res = propagate_near(net, theta1_target, prev)
    except PropagationDead as exc:
        state, res = None, math.inf
        fail = str(exc)
    else:
        fail = f"closure residual {res:.3e} above {closure_tol:.1e}"
    if state is not None and state.distance(prev) <= max_jump and res <= 1e-4:
        polished, eq_res = polish_state(net, state)
        if eq_res <= 1e-11 and (res <= closure_tol or polished.distance(state) <= 1e-6):
            return polished
    if depth <= 0:
        raise _BranchDead(fail)
    d = wrap_angle(theta1_target - prev.get(1))
    mid = wrap_angle(prev.get(1) + 0.5 * d)
    half = _continue_to(net, prev, mid, closure_tol, max_jump, depth - 1)
    return _continue_to(net, half, theta1_target, closure_tol, max_jump, depth - 1)


def flexion_trace(
    net: NetAngles,
    start: DihedralState,
    t_range: tuple[float, float],
    steps: int,
    closure_tol: float = 1e-8,
    start_tol: float = 1e-10,
    max_jump: float = 0.2,
) -> FlexionTrace:
    """Continue the branch through ``start`` over a cot(theta_1/2) grid.

    At each new t the transfer solutions nearest the previous state are
    taken, with automatic substepping where branches run close together; the
    trace is truncated as soon as the chain genuinely stops closing to
    ``closure_tol``.
    """
    _, res0 = propagate_near(net, start.get(1), start)
    if res0 > start_tol:
        raise ValueError(f"start state does not close: residual {res0!r}")

    lo, hi = t_range
    ts = [lo + (hi - lo) * i / (steps - 1) for i in range(steps)] if steps > 1 else [lo]
    t_start = start.cot_half(1)

    # order the grid outward from the sample nearest the start state
    k0 = min(range(len(ts)), key=lambda i: abs(ts[i] - t_start))
    order = sorted(range(len(ts)), key=lambda i: (abs(i - k0), i))

    results: dict[int, tuple[float, DihedralState]] = {}
    prev_up = prev_down = start
    died_at, reason = None, ""
    dead_up = dead_down = False
    for idx in order:
        t = ts[idx]
        if (idx >= k0 and dead_up) or (idx < k0 and dead_down):
            continue
        prev = prev_up if idx >= k0 else prev_down
        theta1 = wrap_angle(2.0 * math.atan2(1.0, t))
        try:
            state = _continue_to(net, prev, theta1, closure_tol, max_jump)
        except _BranchDead as exc:
            if died_at is None:
                died_at, reason = t, exc.reason
            if idx >= k0:
                dead_up = True
            if idx <= k0:
                dead_down = True
            continue
        results[idx] = (t, state)
        if idx >= k0:
            prev_up = state
        if idx <= k0:
            prev_down = state

    trace = FlexionTrace(samples=[results[i] for i in sorted(results)],
                         died_at=died_at, reason=reason)
    return trace


@dataclass(frozen=True)
class BricardCoefficients:
    """The 16 values A_ij = 4 cos^2(.) cos^2(.), each in [0, 4]."""

    A: np.ndarray  # shape (4, 4); A[i-1, j-1] = A_ij

    def get(self, i: int, j: int) -> float:
        return float(self.A[i - 1, j - 1])


def bricard_coefficients(state: DihedralState) -> BricardCoefficients:
    """A_ij = 4 cos^2(theta_i/2 + (pi/4) i j (j-1) + pi j/2)
             * cos^2(theta_{i-1}/2 + (pi/4) (i-1) j (j-1) + pi j/2)."""
    A = np.empty((4, 4))
    for i in range(1, 5):
        ti = state.get(i)
        tim1 = state.get(i - 1)
        for j in range(1, 5):
            c1 = math.cos(0.5 * ti + 0.25 * math.pi * i * j * (j - 1) + 0.5 * math.pi * j)
            c2 = math.cos(0.5 * tim1 + 0.25 * math.pi * (i - 1) * j * (j - 1) + 0.5 * math.pi * j)
            A[i - 1, j - 1] = 4.0 * c1 * c1 * c2 * c2
    return BricardCoefficients(A=A)


def eq13_residuals(net: NetAngles, state: DihedralState) -> tuple[tuple[float, ...], tuple[float, ...]]:
    """Unsquared residuals of the cos(delta) and sin(theta) sin(theta) relations.

    Returns (four delta-relation residuals, four dihedral-relation residuals),
    evaluated with the per-vertex quantities u_i, x_i, y_i, z_i, eps_i derived
    from the flat angles.  A non-positive radicand signals inadmissible
    parameters and raises NonRealAngles.
    """
    A = bricard_coefficients(state).A
    g_res, h_res = [], []
    for i in range(1, 5):
        q = derive(net.germ(i))
        u, x, y, z = q.u, q.x, q.y, q.z
        rad = x * y * u * (1.0 + z) * (1.0 + u * z)
        if rad <= 0.0:
            raise NonRealAngles(f"non-positive radicand at vertex {i}: {rad!r}")
        den = 2.0 * math.sqrt(rad)
        g_rhs = q.epsilon * (1.0 - y * z * u - x * z * u + x * y * u) / den
        g_res.append(abs(math.cos(net.germ(i).delta) - g_rhs))
        Ai = A[i - 1]
        h_rhs = q.epsilon * (Ai[0] + Ai[1] * y * z * u + Ai[2] * x * z * u + Ai[3] * x * y * u) / den
        h_lhs = math.sin(state.get(i)) * math.sin(state.get(i - 1))
        h_res.append(abs(h_lhs - h_rhs))
    return tuple(g_res), tuple(h_res)


@dataclass(frozen=True)
class SearchParameters:
    """Unknowns of the algebraic system: u plus the 8 independent x, y, z.

    The amplitude symmetries make x_2 = x_1, x_4 = x_3, y_4 = y_1, y_3 = y_2.
    """

    u: float
    x1: float
    x3: float
    y1: float
    y2: float
    z1: float
    z2: float
    z3: float
    z4: float

    def x(self, i: int) -> float:
        return (self.x1, self.x1, self.x3, self.x3)[i - 1]

    def y(self, i: int) -> float:
        return (self.y1, self.y2, self.y2, self.y1)[i - 1]

    def z(self, i: int) -> float:
        return (self.z1, self.z2, self.z3, self.z4)[i - 1]

    def as_array(self) -> np.ndarray:
        return np.array([self.u, self.x1, self.x3, self.y1, self.y2,
                         self.z1, self.z2, self.z3, self.z4])

    @staticmethod
    def from_array(p: Sequence[float]) -> "SearchParameters":
        return SearchParameters(*(float(v) for v in p))


def _guard_parameters(params: SearchParameters) -> None:
    u = params.u
    if u == 0.0:
        raise NonRealAngles("u = 0")
    for i in range(1, 5):
        for name, v in (("x", params.x(i)), ("y", params.y(i)), ("z", params.z(i))):
            if v == 0.0 or v == -1.0:
                raise NonRealAngles(f"{name}_{i} = {v!r} hits a forbidden value")
        if 1.0 + u * params.z(i) == 0.0:
            raise NonRealAngles(f"u*z_{i} = -1")
        if 1.0 + u * params.x(i) == 0.0 or 1.0 + u * params.y(i) == 0.0:
            raise NonRealAngles(f"u*x_{i} or u*y_{i} = -1")


def _recover_cos(num: float, rad: float, what: str, i: int) -> float:
    if rad <= 0.0:
        raise NonRealAngles(f"negative radicand for {what} at vertex {i}: {rad!r}")
    c = num / (2.0 * math.sqrt(rad))
    if abs(c) > 1.0 + 1e-12:
        raise NonRealAngles(f"|cos {what}_{i}| = {abs(c)!r} > 1")
    return max(-1.0, min(1.0, c))


def recover_flat_angles(
    params: SearchParameters,
    epsilons: Sequence[int],
    sigma_tol: float = 1e-10,
) -> NetAngles:
    """Flat angles from (u, x_i, y_i, z_i) and a sign assignment eps_i.

    The half-sum sigma has its own closed form, used as a consistency check
    against the recovered angles (both its cosine and the sign of its sine).
    """
    _guard_parameters(params)
    u = params.u
    germs = []
    for i in range(1, 5):
        x, y, z = params.x(i), params.y(i), params.z(i)
        e = float(epsilons[i - 1])
        ca = _recover_cos(e * (1.0 - y * z * u + x * z * u - x * y * u),
                          x * z * u * (1.0 + y) * (1.0 + u * y), "alpha", i)
        cg = _recover_cos(e * (1.0 + y * z * u - x * z * u - x * y * u),
                          y * z * u * (1.0 + x) * (1.0 + u * x), "gamma", i)
        cd = _recover_cos(e * (1.0 - y * z * u - x * z * u + x * y * u),
                          x * y * u * (1.0 + z) * (1.0 + u * z), "delta", i)
        num_b = (u * (1.0 + x) * (1.0 + y) * (1.0 + z)
                 + (1.0 + u * x) * (1.0 + u * y) * (1.0 + u * z)
                 - u * x * y * z * (u - 1.0) ** 2)
        rad_b = (u * (1.0 + x) * (1.0 + y) * (1.0 + z)
                 * (1.0 + u * x) * (1.0 + u * y) * (1.0 + u * z))
        cb = _recover_cos(e * num_b, rad_b, "beta", i)

        germ = VertexGermAngles(math.acos(ca), math.acos(cb), math.acos(cg), math.acos(cd))
        sigma = 0.5 * sum(germ.as_tuple())

        num_s = 1.0 - u * (x * y + x * z + y * z + 2.0 * x * y * z)
        rad_s = x * y * z * u * u * (1.0 + x) * (1.0 + y) * (1.0 + z)
        cs = _recover_cos(num_s, rad_s, "sigma", i)
        if abs(math.cos(sigma) - cs) > sigma_tol:
            raise NonRealAngles(
                f"sigma consistency failed at vertex {i}: "
                f"|cos(sum/2) - formula| = {abs(math.cos(sigma) - cs)!r}"
            )
        if (1 if math.sin(sigma) > 0 else -1) != epsilons[i - 1]:
            raise NonRealAngles(f"sign(sin sigma_{i}) disagrees with eps_{i}")
        germs.append(germ)
    return net_from_germs(germs)


class RigidityVerdict(Enum):
    FLEXES = "flexes"
    ISOLATED = "isolated"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class ProbeConfig:
    """Decision constants of the rigidity probe."""

    samples_per_side: int = 8
    closure_tol_flex: float = 1e-8
    closure_tol_isolated: float = 1e-6
    flex_fraction: float = 0.9
    neighborhood: float = 0.35  # max wraparound distance to count as "nearby" (rad)


def rigidity_probe(
    net: NetAngles,
    state: DihedralState,
    radius: float,
    config: ProbeConfig = ProbeConfig(),
) -> RigidityVerdict:
    """Probe whether a closing state admits nearby closing states.

    theta_1 is perturbed on both sides up to ``radius``; for each perturbation
    all 16 branch chains are propagated and only states within
    ``config.neighborhood`` of the original are considered.  FLEXES needs a
    closing nearby state at >= flex_fraction of the samples; ISOLATED needs
    every sample to have no nearby state even at the loose tolerance.
    """
    _, res0 = propagate_near(net, state.get(1), state)
    if res0 > 1e-10:
        raise ValueError(f"probe state does not close: residual {res0!r}")

    n = config.samples_per_side
    offsets = [radius * k / n for k in range(1, n + 1)]
    offsets = [-o for o in offsets] + offsets

    n_close = 0
    n_weak = 0
    for off in offsets:
        theta1 = wrap_angle(state.get(1) + off)
        best = math.inf
        for c0 in (-1, 1):
            for c1 in (-1, 1):
                for c2 in (-1, 1):
                    for c3 in (-1, 1):
                        try:
                            cand, res = propagate(net, theta1, (c0, c1, c2, c3))
                        except PropagationDead:
                            continue
                        if cand.distance(state) <= config.neighborhood:
                            best = min(best, res)
        if best <= config.closure_tol_flex:
            n_close += 1
        if best <= config.closure_tol_isolated:
            n_weak += 1

    if n_close >= config.flex_fraction * len(offsets):
        return RigidityVerdict.FLEXES
    if n_weak == 0:
        return RigidityVerdict.ISOLATED
    return RigidityVerdict.INCONCLUSIVE
