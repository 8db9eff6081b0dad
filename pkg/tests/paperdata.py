"""Shared fixtures: the worked examples with closed-form or published data.

Names follow the roles the nets play in the test-suite:
  * QS_A: quasi-symmetric net from seed (105, 15, 120) degrees, flexes for
    all real t with an explicit radical closed form.
  * QS_B: seed (15, 60, 75) degrees; same flat angles also admit an isolated
    (rigid) dihedral state.
  * ORTHO90: net with all central angles 90 degrees given by exact cosines;
    its flexion has cot(theta_1/2) * cot(theta_3/2) = 1.
  * TABLE_A / TABLE_B: nets published as rounded decimal tables together
    with the design inputs (deltas, thetas) that produce them.
"""
from __future__ import annotations

import math

import numpy as np

from kokonet.angles import VertexGermAngles, net_from_germs
from kokonet.kinematics import DihedralState

SQ = math.sqrt
D2R = math.pi / 180.0

# --- QS_A: seed angles 105, 15, 120 degrees -------------------------------
QS_A_SEED_DEG = (105.0, 15.0, 120.0)

# cot-half closed form: denominators (1 + sqrt3 + 3 t^2) and
# (1 + sqrt3 + sqrt3 t^2), shared radical sqrt(2 + 6 t^2 + 3 t^4)


def qs_a_cot_halves(t: float, branch: int = +1) -> tuple[float, float, float, float]:
    disc = SQ(2.0 + 6.0 * t * t + 3.0 * t ** 4)
    den13 = 1.0 + SQ(3.0) + 3.0 * t * t
    den4 = 1.0 + SQ(3.0) + SQ(3.0) * t * t
    return (
        ((SQ(2.0) - SQ(6.0)) * t + branch * disc) / den13,
        t,
        ((SQ(6.0) - SQ(2.0)) * t + branch * disc) / den13,
        branch * disc / den4,
    )


def qs_a_state(t: float, branch: int = +1) -> DihedralState:
    return DihedralState.from_cot_half(qs_a_cot_halves(t, branch))


# --- QS_B: seed angles 15, 60, 75 degrees ----------------------------------
QS_B_SEED_DEG = (15.0, 60.0, 75.0)


def qs_b_cot_halves(t: float, branch: int = +1) -> tuple[float, float, float, float]:
    disc = SQ(2.0) * SQ(SQ(3.0) * t ** 4 + 6.0 * t * t + 2.0 * SQ(3.0))
    den13 = 2.0 - (SQ(3.0) + 1.0) * t * t
    den4 = (SQ(3.0) - 1.0) * t * t + 2.0
    return (
        (branch * disc - 2.0 * SQ(6.0) * t) / den13,
        t,
        (branch * disc + 2.0 * SQ(6.0) * t) / den13,
        branch * disc / den4,
    )


def qs_b_state(t: float, branch: int = +1) -> DihedralState:
    return DihedralState.from_cot_half(qs_b_cot_halves(t, branch))


def qs_b_isolated_state() -> DihedralState:
    """The rigid companion state sharing QS_B's flat angles."""
    w2 = SQ(1.0 + SQ(3.0))
    w4 = SQ(1.5) * w2
    return DihedralState.from_cot_half((0.0, w2, 0.0, w4))


# --- ORTHO90: exact-cosine net with all deltas 90 degrees ------------------

ORTHO90_COS = {
    "alpha": (1 / SQ(5), 1 / (4 * SQ(11)), 1 / (4 * SQ(11)), 1 / SQ(5)),
    "beta": (7 / (5 * SQ(2)), 7 * SQ(7) / (4 * SQ(22)),
             7 * SQ(7) / (4 * SQ(22)), 7 / (5 * SQ(2))),
    "gamma": (-1 / SQ(10), -1 / (2 * SQ(2)), 1 / (2 * SQ(2)), 1 / SQ(10)),
}

ORTHO90_EXPECTED = {
    "r": (4 / 3, 4 / 3, 5 / 2, 5 / 2),
    "s": (3.0, 11 / 6, 11 / 6, 3.0),
    "f": (2.0, 7 / 4, 5 / 3, 3 / 2),
    "M": 0.5,
}

# exact parameter vector of the algebraic system at this net
ORTHO90_PARAMS = (0.5, 3.0, 2 / 3, 0.5, 6 / 5, 1.0, 4 / 3, 3 / 2, 2.0)

ORTHO90_T_RANGE = (1 / SQ(3), SQ(2) / SQ(3))


def ortho90_net():
    return net_from_germs(
        VertexGermAngles(
            math.acos(ORTHO90_COS["alpha"][i]),
            math.acos(ORTHO90_COS["beta"][i]),
            math.acos(ORTHO90_COS["gamma"][i]),
            0.5 * math.pi,
        )
        for i in range(4)
    )


def ortho90_cot_halves(t: float, branch: int = -1) -> tuple[float, float, float, float]:
    """branch -1 is the non-self-intersecting family."""
    rad = (3.0 * t * t - 1.0) * (2.0 - 3.0 * t * t)
    disc2 = SQ(10.0 * rad)
    disc4 = SQ(2.0 * rad)
    return (
        t,
        (5.0 * SQ(7.0) * t + branch * disc2) / (4.0 + 9.0 * t * t),
        1.0 / t,
        (6.0 * t + branch * disc4) / (1.0 + 3.0 * t * t),
    )


def ortho90_state(t: float, branch: int = -1) -> DihedralState:
    return DihedralState.from_cot_half(ortho90_cot_halves(t, branch))


# --- TABLE_A: published table for inputs deltas (120, 80, 85, 75) ----------

TABLE_A_DELTAS_DEG = (120.0, 80.0, 85.0, 75.0)
TABLE_A_THETAS_DEG = (130.0, 140.0, 125.0, 135.0)
TABLE_A_ANGLES_DEG = {
    "alpha": (91.32, 115.75, 31.19, 28.19),
    "beta": (27.53, 29.33, 113.66, 107.67),
    "gamma": (103.21, 109.78, 89.61, 121.75),
}
TABLE_A_MODULUS = 0.92          # published to two digits
TABLE_A_T_RANGE = (0.36, 1.32)  # flexion parameter range, two digits

# --- TABLE_B: published table for inputs deltas (60, 115, 80, 105) ---------

TABLE_B_DELTAS_DEG = (60.0, 115.0, 80.0, 105.0)
TABLE_B_THETAS_DEG = (120.0, 140.0, 110.0, 130.0)
TABLE_B_ANGLES_DEG = {
    "alpha": (26.20, 16.16, 134.65, 117.95),
    "beta": (82.24, 130.87, 34.44, 49.52),
    "gamma": (21.94, 18.85, 145.36, 149.02),
}
TABLE_B_MODULUS = 1.22
TABLE_B_T_RANGE = (0.0, 1.13)

# cot-half coefficients of TABLE_B's flexion, published to two decimals:
# cot(theta_i/2) = (a t + b * sqrt(c4 t^4 + c2 t^2 + c0)) / (t^2 + d)
TABLE_B_FLEXION = {
    "radicand": (-2.70, 2.67, 1.0),
    2: (-0.21, 0.29, 0.33),
    3: (0.54, 0.31, 0.67),
    4: (-0.39, 0.43, 0.35),
}


def table_net(table: dict[str, tuple], deltas_deg: tuple) -> "NetAngles":
    return net_from_germs(
        VertexGermAngles(
            table["alpha"][i] * D2R, table["beta"][i] * D2R,
            table["gamma"][i] * D2R, deltas_deg[i] * D2R,
        )
        for i in range(4)
    )


def flat_angles_deg(net) -> np.ndarray:
    """The 12 alpha/beta/gamma angles in degrees, vertex-major order."""
    return np.degrees([v for i in range(1, 5) for v in net.germ(i).as_tuple()[:3]])


def table_targets_deg(table: dict[str, tuple]) -> np.ndarray:
    return np.array([
        v for i in range(4)
        for v in (table["alpha"][i], table["beta"][i], table["gamma"][i])
    ])


def random_elliptic_germ(
    rng: np.random.Generator,
    require_admissible: bool = False,
    margin: float = 1e-2,
):
    """Rejection-sample a germ whose signed angle sums stay ``margin`` away
    from the degenerate locus (keeps the derived quantities well-scaled)."""
    from kokonet.angles import admissible, derive, is_elliptic

    while True:
        a, b, g, d = rng.uniform(0.05, math.pi - 0.05, size=4)
        germ = VertexGermAngles(a, b, g, d)
        if not is_elliptic(germ, tol=margin):
            continue
        if require_admissible:
            q = derive(germ)
            if q.M <= 0 or not admissible(q):
                continue
        return germ


def random_qs_seed(rng: np.random.Generator):
    """Rejection-sample a valid quasi-symmetric seed."""
    from kokonet.errors import InvalidSeed, NotElliptic
    from kokonet.qsnet import QsSeed, build_qs_net

    while True:
        a, b, g = rng.uniform(0.06, math.pi - 0.06, size=3)
        seed = QsSeed(a, b, g)
        try:
            build_qs_net(seed)
        except (InvalidSeed, NotElliptic, ValueError):
            continue
        return seed
