"""Theory-informed seed sampling for the multi-start solver.

The unknowns x = 1/(r-1), y = 1/(s-1), z = 1/(f-1) span several orders of
magnitude (they blow up as the amplitude ratios approach 1), so magnitudes
are drawn log-uniformly with random signs rather than uniformly over a box;
that spreads seeds evenly across scales instead of piling them onto the
largest one.  A draw survives only if it satisfies the denominator guards
and the admissibility inequalities of a realizable vertex, re-expressed in
the (u, x, y, z) parameters:

    r, s, f > 0          <=>  x, y, z outside [-1, 0]
    (r-1)(r-M) > 0       <=>  1 + u x > 0        (and likewise for y, z)
    (r-1)(s-1)(f-1)(1-M) > 0  <=>  u and x*y*z share their sign.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import SearchConfig

_XI = (1, 1, 2, 2)
_YI = (3, 4, 4, 3)
_ZI = (5, 6, 7, 8)


@dataclass
class SamplerStats:
    drawn: int = 0
    accepted: int = 0

    @property
    def acceptance_rate(self) -> float:
        return self.accepted / self.drawn if self.drawn else 0.0


def _admissible_mask(batch: np.ndarray, guard: float) -> np.ndarray:
    u = batch[:, 0]
    ok = (np.abs(u) > guard) & (u < 1.0 - guard)
    for col in range(1, 9):
        v = batch[:, col]
        ok &= (np.abs(v) > guard) & (np.abs(v + 1.0) > guard)
        # r, s, f > 0: the variable must lie outside [-1, 0]
        ok &= (v > 0.0) | (v < -1.0)
    for i in range(4):
        x = batch[:, _XI[i]]
        y = batch[:, _YI[i]]
        z = batch[:, _ZI[i]]
        ok &= (1.0 + u * x > guard) & (1.0 + u * y > guard) & (1.0 + u * z > guard)
        ok &= np.sign(u) == np.sign(x * y * z)
    return ok


def sample_seeds(cfg: SearchConfig) -> tuple[np.ndarray, SamplerStats]:
    """Exactly cfg.seed_count admissible seeds, deterministic in cfg.rng_seed."""
    rng = np.random.default_rng(cfg.rng_seed)
    b = cfg.bounds
    log_lo = np.log10(b.xyz_mag_min)
    log_hi = np.log10(b.xyz_bound)
    stats = SamplerStats()
    chunks = []
    remaining = cfg.seed_count
    while remaining > 0:
        n = max(4 * remaining, 1024)
        raw = rng.random((n, 9))
        flips = rng.random((n, 8))
        batch = np.empty((n, 9))
        batch[:, 0] = b.u_min + raw[:, 0] * (1.0 - b.u_min)
        mags = 10.0 ** (log_lo + raw[:, 1:9] * (log_hi - log_lo))
        batch[:, 1:] = np.where(flips < 0.5, -mags, mags)
        mask = _admissible_mask(batch, b.guard)
        stats.drawn += n
        good = batch[mask]
        stats.accepted += len(good)
        take = good[:remaining]
        chunks.append(take)
        remaining -= len(take)
    return np.concatenate(chunks, axis=0), stats
