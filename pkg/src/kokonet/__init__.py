"""kokonet: flexible Kokotsakis nets of equimodular elliptic type.

Construct quasi-symmetric nets with closed-form flexions, classify arbitrary
3x3 nets against the equimodular elliptic conditions, search for nets with
prescribed central and dihedral angles, embed configurations in 3-space, test
them for self-intersection, and export everything for the bundled viewer.
"""
__version__ = "0.1.0"

from .angles import NetAngles, VertexGermAngles, derive, is_elliptic
from .classify import ClassificationReport, classify
from .elliptic import EllipticContext, PhaseShift
from .geometry import EdgeLengths, EmbeddedNet, FlexionBundle, embed, self_intersects
from .kinematics import DihedralState, flexion_trace, propagate, rigidity_probe
from .qsnet import QsSeed, build_qs_net, eval_flexion, qs_flexion
from .search import SearchConfig, run_search

__all__ = [
    "__version__",
    "NetAngles",
    "VertexGermAngles",
    "derive",
    "is_elliptic",
    "ClassificationReport",
    "classify",
    "EllipticContext",
    "PhaseShift",
    "EdgeLengths",
    "EmbeddedNet",
    "FlexionBundle",
    "embed",
    "self_intersects",
    "DihedralState",
    "flexion_trace",
    "propagate",
    "rigidity_probe",
    "QsSeed",
    "build_qs_net",
    "eval_flexion",
    "qs_flexion",
    "SearchConfig",
    "run_search",
]
