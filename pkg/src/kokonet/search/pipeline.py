"""The two-phase search-and-verify pipeline.

Phase one solves the squared algebraic system from many admissible random
seeds.  Phase two filters the converged parameter vectors (physicality,
duplicates), resolves the epsilon signs against the unsquared equations,
recovers the flat angles, and keeps only candidates whose net passes the full
equimodular elliptic classification.
"""
from __future__ import annotations

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import product
from typing import Optional

import numpy as np

from ..angles import NetAngles, is_elliptic
from ..classify import ClassificationReport, classify
from ..errors import NonRealAngles
from ..kinematics import DihedralState, SearchParameters, bricard_coefficients, recover_flat_angles
from ._backend import kernel
from .config import SearchConfig
from .sampler import SamplerStats, sample_seeds
from .trace import ComponentTracer

_XI = (1, 1, 2, 2)
_YI = (3, 4, 4, 3)
_ZI = (5, 6, 7, 8)


def build_consts(cfg: SearchConfig) -> list[float]:
    """Per-vertex constants [cos^2 d_i, (sin t_i sin t_{i-1})^2, A_i1..A_i4]."""
    state = DihedralState(cfg.thetas)
    A = bricard_coefficients(state).A
    consts: list[float] = []
    for i in range(1, 5):
        cd = math.cos(cfg.deltas[i - 1])
        sh = math.sin(state.get(i)) * math.sin(state.get(i - 1))
        consts.extend([cd * cd, sh * sh])
        consts.extend(float(A[i - 1, j]) for j in range(4))
    return consts


def build_consts_signed(cfg: SearchConfig) -> list[float]:
    """Like build_consts but with cos(delta) and the sine product unsquared."""
    state = DihedralState(cfg.thetas)
    A = bricard_coefficients(state).A
    consts: list[float] = []
    for i in range(1, 5):
        consts.append(math.cos(cfg.deltas[i - 1]))
        consts.append(math.sin(state.get(i)) * math.sin(state.get(i - 1)))
        consts.extend(float(A[i - 1, j]) for j in range(4))
    return consts


def residual_system(params: SearchParameters, cfg: SearchConfig) -> tuple[float, ...]:
    """The nine squared residuals at ``params`` (ninth identically zero)."""
    return tuple(kernel.residuals(list(params.as_array()), build_consts(cfg)))


def solve_from_seed(seed: SearchParameters, cfg: SearchConfig) -> Optional[SearchParameters]:
    """Damped Gauss-Newton from one seed; None when it does not converge."""
    p, maxres, _, ok = kernel.lm_solve(
        list(seed.as_array()), build_consts(cfg), cfg.solver_max_iter, cfg.tolerances.solve
    )
    return SearchParameters.from_array(p) if ok else None


def unsquared_residuals(
    p: np.ndarray, cfg: SearchConfig, consts: list[float], epsilons: tuple[int, ...]
) -> tuple[float, ...]:
    """|LHS - eps * RHS| of the eight original equations; NonRealAngles if
    a radicand is not positive."""
    u = p[0]
    out = []
    for i in range(4):
        x, y, z = p[_XI[i]], p[_YI[i]], p[_ZI[i]]
        rad = x * y * u * (1.0 + z) * (1.0 + u * z)
        if rad <= 0.0:
            raise NonRealAngles(f"non-positive radicand at vertex {i + 1}")
        den = 2.0 * math.sqrt(rad)
        e = epsilons[i]
        ng = 1.0 - y * z * u - x * z * u + x * y * u
        cd = math.cos(cfg.deltas[i])
        out.append(abs(cd - e * ng / den))
        nh = (consts[6 * i + 2] + consts[6 * i + 3] * y * z * u
              + consts[6 * i + 4] * x * z * u + consts[6 * i + 5] * x * y * u)
        sh = math.sin(cfg.thetas[i]) * math.sin(cfg.thetas[i - 1])
        out.append(abs(sh - e * nh / den))
    return tuple(out)


@dataclass(frozen=True)
class VerifiedSolution:
    params: SearchParameters
    epsilons: tuple[int, int, int, int]
    net: NetAngles
    report: ClassificationReport
    residual_max: float

    def to_json_dict(self) -> dict:
        def sig15(x: float) -> float:
            return float(f"{x:.15g}")

        def angles(vals) -> dict:
            return {
                "rad": [sig15(v) for v in vals],
                "deg": [sig15(math.degrees(v)) for v in vals],
            }

        return {
            "params": {k: sig15(v) for k, v in zip(
                ("u", "x1", "x3", "y1", "y2", "z1", "z2", "z3", "z4"),
                self.params.as_array())},
            "epsilons": list(self.epsilons),
            "net": {
                "alpha": angles(self.net.alphas()),
                "beta": angles(self.net.betas()),
                "gamma": angles(self.net.gammas()),
                "delta": angles(self.net.deltas()),
            },
            "classification": self.report.to_json_dict(),
            "residual_max": sig15(self.residual_max),
        }


@dataclass
class SearchOutcome:
    solutions: list[VerifiedSolution] = field(default_factory=list)
    sampler: SamplerStats = field(default_factory=SamplerStats)
    n_seeds: int = 0
    n_converged: int = 0
    n_unphysical: int = 0
    n_duplicates: int = 0
    n_sign_ambiguous: int = 0
    n_nonreal: int = 0
    n_not_elliptic: int = 0
    n_classify_failed: int = 0
    n_period_failed: int = 0
    n_components: int = 0
    n_traced_nodes: int = 0

    def stats_dict(self) -> dict:
        return {
            "seeds": self.n_seeds,
            "sampler_acceptance_rate": self.sampler.acceptance_rate,
            "converged": self.n_converged,
            "unphysical": self.n_unphysical,
            "duplicates": self.n_duplicates,
            "sign_ambiguous": self.n_sign_ambiguous,
            "non_real_angles": self.n_nonreal,
            "not_elliptic": self.n_not_elliptic,
            "classification_failed": self.n_classify_failed,
            "period_condition_failed": self.n_period_failed,
            "components_traced": self.n_components,
            "traced_nodes": self.n_traced_nodes,
            "verified": len(self.solutions),
        }


def _solve_chunk(args) -> list:
    seeds, consts, max_iter, tol, signed = args
    if signed:
        return kernel.solve_batch_signed(seeds, consts, max_iter, tol)
    return kernel.solve_batch(seeds, consts, max_iter, tol)


def _solve_all(seed_lists, consts, cfg: SearchConfig, signed: bool) -> list:
    if cfg.workers > 1:
        chunk = max(1, (len(seed_lists) + cfg.workers - 1) // cfg.workers)
        jobs = [(seed_lists[k:k + chunk], consts, cfg.solver_max_iter,
                 cfg.tolerances.solve, signed)
                for k in range(0, len(seed_lists), chunk)]
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            chunk_results = list(pool.map(_solve_chunk, jobs))
        return [r for part in chunk_results for r in part]
    return _solve_chunk((seed_lists, consts, cfg.solver_max_iter,
                         cfg.tolerances.solve, signed))


def _verify_candidate(
    arr: np.ndarray,
    epsilons: tuple[int, ...],
    cfg: SearchConfig,
    consts: list[float],
    outcome: "SearchOutcome",
) -> Optional[VerifiedSolution]:
    """Recover angles, check ellipticity and run the full classification."""
    try:
        residual_max = max(unsquared_residuals(arr, cfg, consts, epsilons))
    except NonRealAngles:
        outcome.n_nonreal += 1
        return None
    if residual_max > cfg.tolerances.validate:
        outcome.n_sign_ambiguous += 1
        return None
    try:
        net = recover_flat_angles(SearchParameters.from_array(arr), epsilons)
    except (NonRealAngles, ValueError):
        outcome.n_nonreal += 1
        return None
    if not all(is_elliptic(g) for g in net.vertices):
        outcome.n_not_elliptic += 1
        return None
    report = classify(net, tol=cfg.tolerances.classify)
    if not report.verdict:
        if report.moduli_equal and report.amplitudes_match:
            outcome.n_period_failed += 1
        else:
            outcome.n_classify_failed += 1
        return None
    return VerifiedSolution(
        params=SearchParameters.from_array(arr),
        epsilons=tuple(epsilons),
        net=net,
        report=report,
        residual_max=residual_max,
    )


def run_search(cfg: SearchConfig) -> SearchOutcome:
    """Sample, solve, filter, sign-resolve, recover, classify.

    Deterministic given the configuration (including rng_seed); with
    ``cfg.workers > 1`` seed chunks are solved in parallel and merged back in
    seed order, so parallel and serial runs return identical output.
    """
    outcome = SearchOutcome()
    seeds, outcome.sampler = sample_seeds(cfg)
    outcome.n_seeds = len(seeds)
    consts = build_consts(cfg)
    consts_signed = build_consts_signed(cfg)

    seed_lists = [list(map(float, s)) for s in seeds]
    results_sq = _solve_all(seed_lists, consts, cfg, signed=False)
    results_sg = _solve_all(seed_lists, consts_signed, cfg, signed=True)

    converged: list[np.ndarray] = []
    for p, _maxres, ok in results_sq:
        if not ok:
            continue
        outcome.n_converged += 1
        arr = np.asarray(p)
        if not arr[0] < 1.0:
            outcome.n_unphysical += 1
            continue
        converged.append(arr)
    for p, _maxres, ok, _eps in results_sg:
        if not ok:
            continue
        outcome.n_converged += 1
        arr = np.asarray(p)
        if not arr[0] < 1.0:
            outcome.n_unphysical += 1
            continue
        converged.append(arr)

    # dedupe in seed order by max-norm distance in parameter space
    kept: list[np.ndarray] = []
    kept_arr = np.empty((0, 9))
    for arr in converged:
        if len(kept) and float(np.min(np.max(np.abs(kept_arr - arr), axis=1))) < cfg.dedupe_radius:
            outcome.n_duplicates += 1
            continue
        kept.append(arr)
        kept_arr = np.vstack([kept_arr, arr[None, :]])

    tol = cfg.tolerances
    landings: list[VerifiedSolution] = []
    for arr in kept:
        # epsilon resolution: exactly one assignment passes, all others fail
        passing: list[tuple[tuple[int, ...], float]] = []
        ambiguous = False
        try:
            for eps in product((1, -1), repeat=4):
                res = unsquared_residuals(arr, cfg, consts, eps)
                worst = max(res)
                if worst <= tol.validate:
                    passing.append((eps, worst))
                elif worst <= tol.validate_reject:
                    ambiguous = True
        except NonRealAngles:
            outcome.n_nonreal += 1
            continue
        if len(passing) != 1 or ambiguous:
            outcome.n_sign_ambiguous += 1
            continue
        epsilons, _ = passing[0]
        sol = _verify_candidate(arr, epsilons, cfg, consts, outcome)
        if sol is not None:
            landings.append(sol)

    outcome.solutions.extend(landings)
    if cfg.trace.enabled and landings:
        _trace_components(landings, cfg, consts, outcome)

    outcome.solutions.sort(key=lambda s: s.residual_max)
    return outcome


def _trace_components(
    landings: list[VerifiedSolution],
    cfg: SearchConfig,
    consts: list[float],
    outcome: SearchOutcome,
) -> None:
    """Resolve the one-parameter solution families through the landing points.

    Each emitted node is verified independently; nodes within dedupe_radius
    of an existing solution are dropped, keeping the output deterministic.
    """
    consts_signed = build_consts_signed(cfg)

    emitted = np.array([s.params.as_array() for s in outcome.solutions]).reshape(-1, 9)
    polylines: list[tuple[tuple[int, ...], list[np.ndarray]]] = []

    # best landings first; parameter tuple breaks residual ties deterministically
    ordered = sorted(landings,
                     key=lambda s: (s.residual_max, tuple(s.params.as_array())))
    for landing in ordered:
        if outcome.n_components >= cfg.trace.max_components:
            break
        if outcome.n_traced_nodes >= cfg.trace.node_budget:
            break
        eps = landing.epsilons
        p0 = landing.params.as_array()

        def residual_fn(p: np.ndarray, _e=eps) -> np.ndarray:
            r = np.asarray(kernel.residuals_signed(list(p), consts_signed, _e)[:8])
            if float(np.max(np.abs(r))) >= 1e5:  # kernel penalty = domain exit
                raise NonRealAngles("radicand outside domain")
            return r

        def jacobian_fn(p: np.ndarray, _e=eps) -> np.ndarray:
            return np.asarray(
                kernel.jacobian_signed(list(p), consts_signed, _e)
            ).reshape(8, 9)

        def angles_fn(p: np.ndarray, _e=eps) -> np.ndarray:
            # loose sigma tolerance: navigation only, emission re-verifies
            try:
                net = recover_flat_angles(SearchParameters.from_array(p), _e,
                                          sigma_tol=1e-6)
            except ValueError as exc:
                raise NonRealAngles(str(exc)) from exc
            return np.degrees([v for i in range(1, 5)
                               for v in net.germ(i).as_tuple()[:3]])

        tracer = ComponentTracer(residual_fn, angles_fn, cfg.trace,
                                 jacobian_fn=jacobian_fn)
        if any(e == eps and tracer.belongs(p0, nodes) for e, nodes in polylines):
            continue

        refined = tracer.refine(p0)
        if refined is not None:
            p0 = refined
        nodes = tracer.trace(p0)
        polylines.append((eps, nodes))
        outcome.n_components += 1
        outcome.n_traced_nodes += len(nodes)

        for node in nodes[1:]:
            if len(emitted) and float(
                np.min(np.max(np.abs(emitted - node), axis=1))
            ) < cfg.dedupe_radius:
                continue
            sol = _verify_candidate(node, eps, cfg, consts, outcome)
            if sol is not None:
                outcome.solutions.append(sol)
                emitted = np.vstack([emitted, node[None, :]])


def export_solutions(outcome: SearchOutcome, path: str) -> None:
    payload = {
        "solutions": [s.to_json_dict() for s in outcome.solutions],
        "stats": outcome.stats_dict(),
    }
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=1)
        fh.write("\n")
