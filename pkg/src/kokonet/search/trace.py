"""Component resolution for the search pipeline.

The algebraic system has eight equations in nine unknowns, so its solutions
come in one-parameter families: each multi-start hit lands somewhere on a
curve of equally valid nets realizing the prescribed angles.  To make search
output reproducible (and to cover any published representative point), every
discovered component is traced with a predictor/corrector walk whose step is
controlled in flat-angle space, and each node is verified and emitted as a
solution of its own.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from ..errors import KokonetError, NonRealAngles

_XI = (1, 1, 2, 2)
_YI = (3, 4, 4, 3)
_ZI = (5, 6, 7, 8)


@dataclass(frozen=True)
class TraceSettings:
    """Budget and resolution of the component walk."""

    enabled: bool = True
    angle_step_deg: float = 0.04   # max flat-angle change per emitted node
    max_nodes: int = 4000          # per direction, per component
    max_components: int = 16       # components traced per search, best first
    node_budget: int = 40000       # total nodes across all components
    param_cap: float = 1e3         # stop when any |parameter| grows past this
    stall_window: int = 80         # stop a direction when this many nodes...
    stall_angle_deg: float = 0.2   # ...advance the angles less than this total
    membership_factor: float = 2.0  # landing point belongs to a traced curve


def signed_residuals(
    p: np.ndarray, consts: list, cos_deltas, sin_theta_products, epsilons
) -> np.ndarray:
    """Signed versions of the eight original equations (for Jacobians)."""
    u = p[0]
    out = np.empty(8)
    for i in range(4):
        x, y, z = p[_XI[i]], p[_YI[i]], p[_ZI[i]]
        rad = x * y * u * (1.0 + z) * (1.0 + u * z)
        if rad <= 0.0:
            raise NonRealAngles(f"non-positive radicand at vertex {i + 1}")
        den = 2.0 * math.sqrt(rad)
        e = epsilons[i]
        ng = 1.0 - y * z * u - x * z * u + x * y * u
        out[2 * i] = cos_deltas[i] - e * ng / den
        nh = (consts[6 * i + 2] + consts[6 * i + 3] * y * z * u
              + consts[6 * i + 4] * x * z * u + consts[6 * i + 5] * x * y * u)
        out[2 * i + 1] = sin_theta_products[i] - e * nh / den
    return out


class ComponentTracer:
    """Predictor/corrector walk along one solution component."""

    def __init__(
        self,
        residual_fn: Callable[[np.ndarray], np.ndarray],
        angles_fn: Callable[[np.ndarray], np.ndarray],
        settings: TraceSettings,
        jacobian_fn: Optional[Callable[[np.ndarray], np.ndarray]] = None,
    ):
        self.residual = residual_fn
        self.angles = angles_fn  # flat angles in degrees, or raises
        self.settings = settings
        self._jacobian_fn = jacobian_fn

    def _jacobian(self, p: np.ndarray) -> np.ndarray:
        if self._jacobian_fn is not None:
            return self._jacobian_fn(p)
        J = np.empty((8, 9))
        for j in range(9):
            h = 1e-6 * (1.0 + abs(p[j]))
            pp = p.copy()
            pm = p.copy()
            pp[j] += h
            pm[j] -= h
            J[:, j] = (self.residual(pp) - self.residual(pm)) / (2.0 * h)
        return J

    def _project(self, p: np.ndarray) -> Optional[np.ndarray]:
        try:
            for _ in range(25):
                r = self.residual(p)
                if float(np.max(np.abs(r))) < 1e-12:
                    return p
                J = self._jacobian(p)
                step, *_ = np.linalg.lstsq(J, r, rcond=None)
                p = p - step
                if float(np.max(np.abs(step))) < 1e-14:
                    break
            return p if float(np.max(np.abs(self.residual(p)))) < 1e-10 else None
        except KokonetError:
            return None

    def refine(self, p: np.ndarray) -> Optional[np.ndarray]:
        """Project a near-solution exactly onto the component manifold."""
        return self._project(p.copy())

    def _kernel_direction(self, p: np.ndarray) -> np.ndarray:
        J = self._jacobian(p)
        _, _, Vt = np.linalg.svd(J)
        k = Vt[-1]
        # canonical orientation: largest-magnitude component positive
        piv = int(np.argmax(np.abs(k)))
        return k if k[piv] > 0 else -k

    def trace(self, p0: np.ndarray) -> list[np.ndarray]:
        """Nodes along the component through p0 (p0 first, ends appended)."""
        s = self.settings
        nodes = [p0.copy()]
        closed = False
        for direction in (1.0, -1.0):
            if closed:
                break
            cur = p0.copy()
            try:
                prev_dir = direction * self._kernel_direction(cur)
                a_prev = self.angles(cur)
            except KokonetError:
                break
            recent: list[float] = []
            steps = 0
            for _ in range(s.max_nodes):
                try:
                    kdir = self._kernel_direction(cur)
                except KokonetError:
                    break
                if float(np.dot(kdir, prev_dir)) < 0.0:
                    kdir = -kdir

                # angle sensitivity of a small probe step sets the step size
                probe = self._project(cur + 1e-4 * kdir)
                if probe is None:
                    break
                try:
                    a_probe = self.angles(probe)
                except KokonetError:
                    break
                sens = float(np.max(np.abs(a_probe - a_prev))) / 1e-4
                ds = min(0.5, max(1e-4, s.angle_step_deg / max(sens, 1e-9)))

                nxt = self._project(cur + ds * kdir)
                if nxt is None:
                    break
                if float(np.max(np.abs(nxt))) > s.param_cap:
                    break
                try:
                    a_next = self.angles(nxt)
                except KokonetError:
                    break

                advance = float(np.max(np.abs(a_next - a_prev)))
                recent.append(advance)
                if len(recent) > s.stall_window:
                    recent.pop(0)
                    if sum(recent) < s.stall_angle_deg:
                        break

                nodes.append(nxt.copy())
                steps += 1
                prev_dir = kdir
                cur = nxt
                a_prev = a_next
                if steps > 20 and float(np.max(np.abs(cur - p0))) < 0.5 * ds:
                    closed = True
                    break
        return nodes

    def belongs(self, p: np.ndarray, nodes: list[np.ndarray]) -> bool:
        """Whether a landing point sits on an already-traced polyline.

        Requires closeness both in parameter space (relative to the local node
        spacing) and in flat-angle space, so sprawling polylines do not absorb
        landings of nearby but distinct components.
        """
        if not nodes:
            return False
        factor = self.settings.membership_factor
        arr = np.stack(nodes)
        d = np.max(np.abs(arr - p), axis=1)
        k = int(np.argmin(d))
        spacing = 1e-3
        if len(nodes) > 1:
            neighbor = nodes[k - 1] if k > 0 else nodes[k + 1]
            spacing = max(spacing, float(np.max(np.abs(arr[k] - neighbor))))
        if float(d[k]) >= factor * spacing:
            return False
        try:
            da = float(np.max(np.abs(self.angles(p) - self.angles(arr[k]))))
        except KokonetError:
            return False
        return da < max(10.0 * self.settings.angle_step_deg, 0.5)
