"""Search configuration: inputs, tolerances, seed bounds, file loading."""
from __future__ import annotations

import json
import math
import sys
from dataclasses import dataclass, field
from typing import Sequence

from .trace import TraceSettings

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class ToleranceLadder:
    """Tolerances of the pipeline, from solver to final classification."""

    solve: float = 1e-11          # max |squared residual| for LM convergence
    validate: float = 1e-9        # unsquared residuals a candidate must meet
    validate_reject: float = 1e-6  # level every *other* sign choice must fail
    classify: float = 1e-9        # equimodularity and period condition


@dataclass(frozen=True)
class SeedBounds:
    """Sampling ranges for the multi-start seeds (before admissibility rejection).

    x, y, z magnitudes are drawn log-uniformly in [xyz_mag_min, xyz_bound]
    with random signs; u uniformly in (u_min, 1).
    """

    u_min: float = -10.0
    xyz_bound: float = 50.0
    xyz_mag_min: float = 0.05
    guard: float = 1e-3           # keep-away margin around 0, -1, u = 1


@dataclass(frozen=True)
class SearchConfig:
    """Inputs and knobs of the two-phase search.

    ``deltas`` are the central flat angles (must sum to 2*pi), ``thetas`` the
    prescribed dihedral angles, both in radians.
    """

    deltas: tuple[float, float, float, float]
    thetas: tuple[float, float, float, float]
    seed_count: int = 20000
    rng_seed: int = 0
    solver_max_iter: int = 60
    dedupe_radius: float = 1e-6
    tolerances: ToleranceLadder = field(default_factory=ToleranceLadder)
    bounds: SeedBounds = field(default_factory=SeedBounds)
    trace: TraceSettings = field(default_factory=TraceSettings)
    workers: int = 1

    def __post_init__(self):
        if abs(sum(self.deltas) - TWO_PI) > 1e-12:
            raise ValueError(
                f"deltas sum to {sum(self.deltas)!r}; the central quad needs 2*pi"
            )
        for th in self.thetas:
            if not 0.0 < th < math.pi:
                raise ValueError(f"theta={th!r} outside (0, pi)")

    @staticmethod
    def from_degrees(deltas_deg: Sequence[float], thetas_deg: Sequence[float],
                     **kw) -> "SearchConfig":
        return SearchConfig(
            deltas=tuple(math.radians(d) for d in deltas_deg),
            thetas=tuple(math.radians(t) for t in thetas_deg),
            **kw,
        )


def _config_from_dict(d: dict) -> SearchConfig:
    if "deltas_deg" in d:
        deltas = tuple(math.radians(x) for x in d["deltas_deg"])
    else:
        deltas = tuple(d["deltas_rad"])
    if "thetas_deg" in d:
        thetas = tuple(math.radians(x) for x in d["thetas_deg"])
    else:
        thetas = tuple(d["thetas_rad"])

    kw = {}
    for key in ("seed_count", "rng_seed", "solver_max_iter", "dedupe_radius", "workers"):
        if key in d:
            kw[key] = d[key]
    if "tolerances" in d:
        kw["tolerances"] = ToleranceLadder(**d["tolerances"])
    if "bounds" in d:
        kw["bounds"] = SeedBounds(**d["bounds"])
    if "trace" in d:
        kw["trace"] = TraceSettings(**d["trace"])
    return SearchConfig(deltas=deltas, thetas=thetas, **kw)


def load_config(path: str) -> SearchConfig:
    """Read a SearchConfig from a .json or .toml file."""
    if path.endswith(".toml"):
        if sys.version_info >= (3, 11):
            import tomllib
        else:
            import tomli as tomllib
        with open(path, "rb") as fh:
            return _config_from_dict(tomllib.load(fh))
    with open(path) as fh:
        return _config_from_dict(json.load(fh))
