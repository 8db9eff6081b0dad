"""Multi-start search for equimodular elliptic nets with prescribed angles."""
from ._backend import BACKEND_NAME, HAS_COMPILED
from .config import SearchConfig, SeedBounds, ToleranceLadder, load_config
from .pipeline import (
    SearchOutcome,
    VerifiedSolution,
    build_consts,
    export_solutions,
    residual_system,
    run_search,
    solve_from_seed,
    unsquared_residuals,
)
from .sampler import SamplerStats, sample_seeds

__all__ = [
    "BACKEND_NAME",
    "HAS_COMPILED",
    "SearchConfig",
    "SeedBounds",
    "ToleranceLadder",
    "load_config",
    "SearchOutcome",
    "VerifiedSolution",
    "build_consts",
    "export_solutions",
    "residual_system",
    "run_search",
    "solve_from_seed",
    "unsquared_residuals",
    "SamplerStats",
    "sample_seeds",
]
