"""3D reconstruction of the 12-vertex / 9-face net, validity checks and export.

The central quad A1A2A3A4 is built in the z = 0 plane (A2 at the origin, A1
on the +x axis, A3 in the upper half-plane).  Each of the four inner edges
carries a side face: the half-plane leaving the edge in direction

    w_j = cos(theta_j) m_j + sin(theta_j) z

where m_j is the in-plane unit normal of edge j pointing into the central
quad and z the unit normal of the base plane.  Wing points B_i, C_i are laid
off inside those half-planes at the prescribed flat angles, which makes side
faces planar by construction; the corner angle beta_i then matches its input
exactly when the dihedral state lies on the configuration space.

Edge lengths are free parameters of the realization (only angles are
constrained); defaults put every free length at 1.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .angles import NetAngles, VertexGermAngles, net_from_germs
from .errors import DegenerateQuad, EmbedInconsistent, KokonetError
from .kinematics import DihedralState, angle_distance, wrap_angle

BUNDLE_SCHEMA = "kokonet/flexion-bundle/1"

VERTEX_ORDER = ("A1", "A2", "A3", "A4", "B1", "B2", "B3", "B4", "C1", "C2", "C3", "C4")

# face name -> vertex labels (quads and corner triangles)
FACES: tuple[tuple[str, tuple[str, ...]], ...] = (
    ("central", ("A1", "A2", "A3", "A4")),
    ("side12", ("B1", "A1", "A2", "B2")),
    ("side23", ("C2", "A2", "A3", "C3")),
    ("side34", ("B3", "A3", "A4", "B4")),
    ("side41", ("C4", "A4", "A1", "C1")),
    ("corner1", ("B1", "A1", "C1")),
    ("corner2", ("B2", "A2", "C2")),
    ("corner3", ("B3", "A3", "C3")),
    ("corner4", ("B4", "A4", "C4")),
)

# wing bookkeeping: B_i sits on edge i (odd i) / i-1 (even i); C_i on the other
_EDGE_ENDPOINTS = {1: (1, 2), 2: (2, 3), 3: (3, 4), 4: (4, 1)}


def _wing_edges(i: int) -> tuple[int, int]:
    """(edge of B_i, edge of C_i), edges indexed by their dihedral angle."""
    if i % 2 == 1:
        return i, 4 if i == 1 else i - 1
    return i - 1, i


def _unit(v: np.ndarray) -> np.ndarray:
    n = float(np.linalg.norm(v))
    if n == 0.0:
        raise ValueError("zero vector")
    return v / n


@dataclass(frozen=True)
class EdgeLengths:
    """Free lengths of the realization (central sides A3A4/A4A1 are solved)."""

    a1a2: float = 1.0
    a2a3: float = 1.0
    wing_b: tuple[float, float, float, float] = (1.0, 1.0, 1.0, 1.0)
    wing_c: tuple[float, float, float, float] = (1.0, 1.0, 1.0, 1.0)

    def to_json_dict(self) -> dict:
        return {"a1a2": self.a1a2, "a2a3": self.a2a3,
                "wing_b": list(self.wing_b), "wing_c": list(self.wing_c)}

    @staticmethod
    def from_json_dict(d: dict) -> "EdgeLengths":
        return EdgeLengths(
            a1a2=d["a1a2"], a2a3=d["a2a3"],
            wing_b=tuple(d["wing_b"]), wing_c=tuple(d["wing_c"]),
        )


def _side_face_convex(L: float, a_left: float, r_left: float,
                      a_right: float, r_right: float) -> bool:
    """Convexity of one side face in its planar development.

    The face is the quad wing-left, end-left, end-right, wing-right with the
    wings laid off at the given angles above the shared edge; only the two
    wing corners can go reflex.
    """
    blx = r_left * math.cos(a_left)
    bly = r_left * math.sin(a_left)
    brx = L - r_right * math.cos(a_right)
    bry = r_right * math.sin(a_right)
    dx, dy = brx - blx, bry - bly
    at_left = dx * bly - dy * blx
    at_right = bry * dx - (brx - L) * dy
    return at_left > 0.0 and at_right > 0.0


def auto_edge_lengths(net: NetAngles, base: Optional[EdgeLengths] = None) -> EdgeLengths:
    """Shrink wing lengths, per side face, until every face is convex.

    Only the angles of a realization are constrained; the free wing lengths
    must still keep each face a convex quad, which fails for slivery nets
    when wings are long relative to their central edge.  Each wing pair is
    scaled by the largest value on a fixed ladder that keeps its own side
    face convex, so results are deterministic.
    """
    if base is None:
        base = EdgeLengths()
    quad = build_central_quad(net.deltas(), base.a1a2, base.a2a3)
    edge_len = {j: float(np.linalg.norm(quad[p] - quad[q]))
                for j, (p, q) in _EDGE_ENDPOINTS.items()}
    a = net.alphas()
    g = net.gammas()
    # side face j: (left wing angle, left length, right wing angle, right length)
    faces = {
        1: (a[0], base.wing_b[0], a[1], base.wing_b[1]),
        2: (g[1], base.wing_c[1], g[2], base.wing_c[2]),
        3: (a[2], base.wing_b[2], a[3], base.wing_b[3]),
        4: (g[3], base.wing_c[3], g[0], base.wing_c[0]),
    }
    ladder = [1.0]
    while ladder[-1] > 1e-4:
        ladder.append(ladder[-1] * 0.7)

    scale = {}
    for j, (al, rl, ar, rr) in faces.items():
        for s in ladder:
            if _side_face_convex(edge_len[j], al, s * rl, ar, s * rr):
                scale[j] = s
                break
        else:
            raise DegenerateQuad(
                f"no wing scale keeps the side face on edge {j} convex")

    if all(s == 1.0 for s in scale.values()):
        return base
    return EdgeLengths(
        a1a2=base.a1a2, a2a3=base.a2a3,
        wing_b=(scale[1] * base.wing_b[0], scale[1] * base.wing_b[1],
                scale[3] * base.wing_b[2], scale[3] * base.wing_b[3]),
        wing_c=(scale[4] * base.wing_c[0], scale[2] * base.wing_c[1],
                scale[2] * base.wing_c[2], scale[4] * base.wing_c[3]),
    )


def build_central_quad(
    deltas: Sequence[float], side_a1a2: float = 1.0, side_a2a3: float = 1.0
) -> dict[int, np.ndarray]:
    """Planar quad with interior angle delta_i at A_i; returns {1..4: point}.

    A2 sits at the origin, A1 on the +x axis, A3 in the y >= 0 half-plane;
    the two remaining side lengths are solved from the angle constraints.
    """
    d1, d2, d3, d4 = deltas
    if any(not 0.0 < d < math.pi for d in deltas):
        raise DegenerateQuad("every central angle must lie in (0, pi)")
    if abs(sum(deltas) - 2.0 * math.pi) > 1e-8:
        raise DegenerateQuad(f"central angles sum to {sum(deltas)!r}, need 2*pi")

    A2 = np.array([0.0, 0.0, 0.0])
    A1 = np.array([side_a1a2, 0.0, 0.0])
    A3 = side_a2a3 * np.array([math.cos(d2), math.sin(d2), 0.0])

    # rays toward A4, from A1 and from A3
    u1 = np.array([-math.cos(d1), math.sin(d1), 0.0])
    dir32 = _unit(A2 - A3)
    c3, s3 = math.cos(d3), math.sin(d3)
    u3 = np.array([c3 * dir32[0] - s3 * dir32[1], s3 * dir32[0] + c3 * dir32[1], 0.0])

    mat = np.array([[u1[0], -u3[0]], [u1[1], -u3[1]]])
    rhs = (A3 - A1)[:2]
    det = float(np.linalg.det(mat))
    if abs(det) < 1e-14:
        raise DegenerateQuad("degenerate angle data: rays to A4 are parallel")
    s, r = np.linalg.solve(mat, rhs)
    if s <= 1e-12 or r <= 1e-12:
        raise DegenerateQuad(f"no positive-length solution (s={s!r}, r={r!r})")
    A4 = A1 + s * u1

    pts = {1: A1, 2: A2, 3: A3, 4: A4}
    # convexity: consistent turning around the boundary
    cross_signs = []
    for i in range(1, 5):
        p = pts[i]
        q = pts[i % 4 + 1]
        rr = pts[(i + 1) % 4 + 1]
        cz = float(np.cross(q - p, rr - q)[2])
        cross_signs.append(cz)
    if not (all(c > 0 for c in cross_signs) or all(c < 0 for c in cross_signs)):
        raise DegenerateQuad("central quad is not convex")
    return pts


@dataclass(frozen=True)
class EmbeddedNet:
    """Concrete 3x3 net: 12 labeled points and the 9 canonical faces."""

    vertices: dict[str, np.ndarray]
    edge_lengths: EdgeLengths

    def point(self, label: str) -> np.ndarray:
        return self.vertices[label]

    def face_points(self, face: tuple[str, ...]) -> list[np.ndarray]:
        return [self.vertices[lbl] for lbl in face]

    def diameter(self) -> float:
        pts = np.array([self.vertices[lbl] for lbl in VERTEX_ORDER])
        return float(np.linalg.norm(pts.max(axis=0) - pts.min(axis=0)))


def measure_flat_angles(e: EmbeddedNet) -> NetAngles:
    """Re-measure all 16 flat angles from the embedded points."""
    germs = []
    for i in range(1, 5):
        A = e.point(f"A{i}")
        B = e.point(f"B{i}")
        C = e.point(f"C{i}")
        nxt = i + 1 if i % 2 == 1 else i - 1
        oth = i - 1 if i % 2 == 1 else i + 1
        nxt = (nxt - 1) % 4 + 1
        oth = (oth - 1) % 4 + 1
        An = e.point(f"A{nxt}")
        Ao = e.point(f"A{oth}")

        def ang(u, v):
            return math.acos(max(-1.0, min(1.0, float(np.dot(_unit(u), _unit(v))))))

        germs.append(VertexGermAngles(
            alpha=ang(An - A, B - A),
            beta=ang(B - A, C - A),
            gamma=ang(C - A, Ao - A),
            delta=ang(Ao - A, An - A),
        ))
    return net_from_germs(germs)


def measure_dihedrals(e: EmbeddedNet) -> DihedralState:
    """Oriented dihedral angles from the canonical normals.

    With n_0 the central normal and n_i the side-face normal, the interior
    dihedral is pi minus the angle between them; the determinant
    det(n_i, n_0, A_i - A_{i+1}) fixes the sign.
    """
    A = {i: e.point(f"A{i}") for i in range(1, 5)}
    B = {i: e.point(f"B{i}") for i in range(1, 5)}
    C = {i: e.point(f"C{i}") for i in range(1, 5)}
    n0 = np.cross(A[1] - A[2], A[3] - A[2])
    normals = {
        1: np.cross(B[2] - A[2], A[1] - A[2]),
        2: np.cross(A[3] - A[2], C[2] - A[2]),
        3: np.cross(A[4] - A[3], B[3] - A[3]),
        4: np.cross(C[1] - A[1], A[4] - A[1]),
    }
    thetas = []
    for i in range(1, 5):
        ni = normals[i]
        cosang = max(-1.0, min(1.0, float(np.dot(_unit(n0), _unit(ni)))))
        interior = math.pi - math.acos(cosang)
        det = float(np.linalg.det(np.array([ni, n0, A[i] - A[i % 4 + 1]])))
        thetas.append(wrap_angle(interior if det > 0 else -interior))
    return DihedralState(tuple(thetas))


def _face_planarity(points: list[np.ndarray], diameter: float) -> float:
    if len(points) < 4:
        return 0.0
    n = np.cross(points[1] - points[0], points[2] - points[0])
    nn = float(np.linalg.norm(n))
    if nn == 0.0:
        return math.inf
    n = n / nn
    return max(abs(float(np.dot(p - points[0], n))) for p in points) / diameter


def _face_convex(points: list[np.ndarray]) -> bool:
    if len(points) < 4:
        return True
    n = np.cross(points[1] - points[0], points[2] - points[0])
    signs = []
    m = len(points)
    for i in range(m):
        u = points[(i + 1) % m] - points[i]
        v = points[(i + 2) % m] - points[(i + 1) % m]
        signs.append(float(np.dot(np.cross(u, v), n)))
    return all(s > 0 for s in signs) or all(s < 0 for s in signs)


def embed(
    net: NetAngles,
    state: DihedralState,
    lengths: EdgeLengths = EdgeLengths(),
    tol: float = 1e-8,
) -> EmbeddedNet:
    """Reconstruct the net in 3-space and verify every shape invariant.

    Raises EmbedInconsistent (naming the worst offender) when the measured
    angles do not reproduce the inputs, which is exactly the signature of a
    dihedral state that does not close.
    """
    A = build_central_quad(net.deltas(), lengths.a1a2, lengths.a2a3)
    zh = _unit(np.cross(A[1] - A[2], A[3] - A[2]))

    w = {}
    for j, (p, q) in _EDGE_ENDPOINTS.items():
        m_j = _unit(np.cross(zh, A[p] - A[q]))
        w[j] = math.cos(state.get(j)) * m_j + math.sin(state.get(j)) * zh

    vertices: dict[str, np.ndarray] = {f"A{i}": A[i] for i in range(1, 5)}
    for i in range(1, 5):
        germ = net.germ(i)
        jb, jc = _wing_edges(i)
        nb = [v for v in _EDGE_ENDPOINTS[jb] if v != i][0]
        nc = [v for v in _EDGE_ENDPOINTS[jc] if v != i][0]
        eb = _unit(A[nb] - A[i])
        ec = _unit(A[nc] - A[i])
        vertices[f"B{i}"] = A[i] + lengths.wing_b[i - 1] * (
            math.cos(germ.alpha) * eb + math.sin(germ.alpha) * w[jb])
        vertices[f"C{i}"] = A[i] + lengths.wing_c[i - 1] * (
            math.cos(germ.gamma) * ec + math.sin(germ.gamma) * w[jc])

    e = EmbeddedNet(vertices=vertices, edge_lengths=lengths)
    _verify_embedding(e, net, state, tol)
    return e


def _verify_embedding(e: EmbeddedNet, net: NetAngles, state: DihedralState, tol: float) -> None:
    diam = e.diameter()
    worst_name, worst = "", 0.0

    for name, face in FACES:
        pl = _face_planarity(e.face_points(face), diam)
        if pl > worst:
            worst_name, worst = f"planarity of {name}", pl
        if not _face_convex(e.face_points(face)):
            raise EmbedInconsistent(f"face {name} is not convex")

    measured = measure_flat_angles(e)
    for i in range(1, 5):
        for attr in ("alpha", "beta", "gamma", "delta"):
            dev = abs(getattr(measured.germ(i), attr) - getattr(net.germ(i), attr))
            if dev > worst:
                worst_name, worst = f"flat angle {attr}_{i}", dev

    measured_state = measure_dihedrals(e)
    for i in range(1, 5):
        dev = angle_distance(measured_state.get(i), state.get(i))
        if dev > worst:
            worst_name, worst = f"dihedral theta_{i}", dev

    if worst > tol:
        raise EmbedInconsistent(
            f"embedding inconsistent: {worst_name} off by {worst:.3e} (tol {tol:.1e})"
        )


# ---------------------------------------------------------------------------
# self-intersection


def _triangles(e: EmbeddedNet) -> list[tuple[frozenset, np.ndarray, np.ndarray, np.ndarray]]:
    tris = []
    for _, face in FACES:
        pts = e.face_points(face)
        for k in range(1, len(face) - 1):
            tris.append((frozenset((face[0], face[k], face[k + 1])),
                         pts[0], pts[k], pts[k + 1]))
    return tris


def _project_interval(tri: np.ndarray, axis: np.ndarray) -> tuple[float, float]:
    vals = tri @ axis
    return float(vals.min()), float(vals.max())


def _coplanar_overlap(t1: np.ndarray, t2: np.ndarray, n: np.ndarray, tau: float) -> bool:
    # separating-axis test in the common plane; contact within tau is not overlap
    axes = []
    for tri in (t1, t2):
        for k in range(3):
            edge = tri[(k + 1) % 3] - tri[k]
            axes.append(np.cross(edge, n))
    for axis in axes:
        norm = float(np.linalg.norm(axis))
        if norm < 1e-300:
            continue
        axis = axis / norm
        lo1, hi1 = _project_interval(t1, axis)
        lo2, hi2 = _project_interval(t2, axis)
        if min(hi1, hi2) - max(lo1, lo2) <= tau:
            return False
    return True


def _plane_crossing_segment(
    tri: np.ndarray, dist: np.ndarray, direction: np.ndarray
) -> Optional[tuple[float, float]]:
    """Projection interval, on ``direction``, of the triangle's slice by the plane."""
    pts = []
    for i in range(3):
        j = (i + 1) % 3
        di, dj = dist[i], dist[j]
        if di == 0.0:
            pts.append(tri[i])
        if di * dj < 0.0:
            pts.append(tri[i] + (di / (di - dj)) * (tri[j] - tri[i]))
    if not pts:
        return None
    vals = [float(np.dot(p, direction)) for p in pts]
    return min(vals), max(vals)


def _tri_tri_intersect(t1: np.ndarray, t2: np.ndarray, tau: float) -> bool:
    n2 = np.cross(t2[1] - t2[0], t2[2] - t2[0])
    d1 = np.array([float(np.dot(p - t2[0], n2)) for p in t1]) / max(float(np.linalg.norm(n2)), 1e-300)
    d1[np.abs(d1) <= tau] = 0.0
    if np.all(d1 > 0) or np.all(d1 < 0):
        return False

    n1 = np.cross(t1[1] - t1[0], t1[2] - t1[0])
    d2 = np.array([float(np.dot(p - t1[0], n1)) for p in t2]) / max(float(np.linalg.norm(n1)), 1e-300)
    d2[np.abs(d2) <= tau] = 0.0
    if np.all(d2 > 0) or np.all(d2 < 0):
        return False

    if np.all(d1 == 0.0) and np.all(d2 == 0.0):
        return _coplanar_overlap(t1, t2, n1, tau)

    direction = np.cross(n1, n2)
    norm = float(np.linalg.norm(direction))
    if norm < 1e-300:
        return False
    direction = direction / norm

    s1 = _plane_crossing_segment(t1, d1, direction)
    s2 = _plane_crossing_segment(t2, d2, direction)
    if s1 is None or s2 is None:
        return False
    return min(s1[1], s2[1]) - max(s1[0], s2[0]) > tau


def self_intersects(e: EmbeddedNet, tol_factor: float = 1e-9) -> bool:
    """True iff two non-adjacent faces interpenetrate beyond contact tolerance.

    Faces are fan-triangulated; triangle pairs sharing any vertex label are
    skipped (adjacency is contact, not intersection).
    """
    tau = tol_factor * e.diameter()
    tris = _triangles(e)
    for i in range(len(tris)):
        li, *p1 = tris[i]
        t1 = np.array(p1)
        for j in range(i + 1, len(tris)):
            lj, *p2 = tris[j]
            if li & lj:
                continue
            if _tri_tri_intersect(t1, np.array(p2), tau):
                return True
    return False


# ---------------------------------------------------------------------------
# flexion bundles and export


@dataclass(frozen=True)
class BundleSample:
    t: float
    state: DihedralState
    embedded: EmbeddedNet


@dataclass
class FlexionBundle:
    net: NetAngles
    lengths: EdgeLengths
    branch: str                      # "+" or "-"
    samples: list[BundleSample] = field(default_factory=list)
    provenance: str = "closed-form"  # closed-form | traced | search

    def to_json_dict(self) -> dict:
        return {
            "schema": BUNDLE_SCHEMA,
            "net": {
                "alpha": list(self.net.alphas()),
                "beta": list(self.net.betas()),
                "gamma": list(self.net.gammas()),
                "delta": list(self.net.deltas()),
            },
            "lengths": self.lengths.to_json_dict(),
            "branch": self.branch,
            "samples": [
                {
                    "t": s.t,
                    "theta": list(s.state.theta),
                    "vertices": {lbl: [float(x) for x in s.embedded.point(lbl)]
                                 for lbl in VERTEX_ORDER},
                }
                for s in self.samples
            ],
            "provenance": self.provenance,
        }

    @staticmethod
    def from_json_dict(d: dict) -> "FlexionBundle":
        if d.get("schema") != BUNDLE_SCHEMA:
            raise KokonetError(
                f"unsupported bundle schema {d.get('schema')!r}, expected {BUNDLE_SCHEMA!r}"
            )
        nd = d["net"]
        net = net_from_germs(
            VertexGermAngles(nd["alpha"][i], nd["beta"][i], nd["gamma"][i], nd["delta"][i])
            for i in range(4)
        )
        lengths = EdgeLengths.from_json_dict(d["lengths"])
        samples = []
        for s in d["samples"]:
            vertices = {lbl: np.array(s["vertices"][lbl], dtype=float) for lbl in VERTEX_ORDER}
            samples.append(BundleSample(
                t=s["t"],
                state=DihedralState(tuple(s["theta"])),
                embedded=EmbeddedNet(vertices=vertices, edge_lengths=lengths),
            ))
        return FlexionBundle(net=net, lengths=lengths, branch=d["branch"],
                             samples=samples, provenance=d.get("provenance", ""))


def export_bundle(bundle: FlexionBundle, path: str) -> None:
    try:
        with open(path, "w") as fh:
            json.dump(bundle.to_json_dict(), fh, indent=1)
            fh.write("\n")
    except OSError as exc:
        raise KokonetError(f"cannot write bundle to {path!r}: {exc}") from exc


def load_bundle(path: str) -> FlexionBundle:
    try:
        with open(path) as fh:
            return FlexionBundle.from_json_dict(json.load(fh))
    except OSError as exc:
        raise KokonetError(f"cannot read bundle from {path!r}: {exc}") from exc


def export_obj(e: EmbeddedNet, path: str, net: Optional[NetAngles] = None) -> None:
    """ASCII OBJ with labeled vertex order and polygon faces."""
    if net is None:
        net = measure_flat_angles(e)
    try:
        with open(path, "w") as fh:
            def deg(vals):
                return "[" + ", ".join(f"{math.degrees(v):.6f}" for v in vals) + "]"

            fh.write("# kokonet flat-angles-deg: "
                     f"alpha={deg(net.alphas())} beta={deg(net.betas())} "
                     f"gamma={deg(net.gammas())} delta={deg(net.deltas())}\n")
            theta = measure_dihedrals(e)
            fh.write(f"# kokonet dihedral-deg: {deg(theta.theta)}\n")
            for lbl in VERTEX_ORDER:
                x, y, z = e.point(lbl)
                fh.write(f"v {x:.17g} {y:.17g} {z:.17g}\n")
            index = {lbl: k + 1 for k, lbl in enumerate(VERTEX_ORDER)}
            for name, face in FACES:
                fh.write("f " + " ".join(str(index[lbl]) for lbl in face) + f"  # {name}\n")
    except OSError as exc:
        raise KokonetError(f"cannot write OBJ to {path!r}: {exc}") from exc


def face_metrics(e: EmbeddedNet) -> dict[str, tuple[tuple[float, ...], tuple[float, ...]]]:
    """Per face: (edge lengths, interior angles) for congruence comparisons."""
    out = {}
    for name, face in FACES:
        pts = e.face_points(face)
        m = len(pts)
        lengths = tuple(float(np.linalg.norm(pts[(k + 1) % m] - pts[k])) for k in range(m))
        angles = []
        for k in range(m):
            u = pts[(k - 1) % m] - pts[k]
            v = pts[(k + 1) % m] - pts[k]
            angles.append(math.acos(max(-1.0, min(1.0, float(np.dot(_unit(u), _unit(v)))))))
        out[name] = (lengths, tuple(angles))
    return out


def congruence_deviation(bundle: FlexionBundle) -> float:
    """Largest variation of any face metric across the bundle's samples."""
    if not bundle.samples:
        return 0.0
    ref = face_metrics(bundle.samples[0].embedded)
    worst = 0.0
    for s in bundle.samples[1:]:
        cur = face_metrics(s.embedded)
        for name in ref:
            for a, b in zip(ref[name], cur[name]):
                for x, y in zip(a, b):
                    worst = max(worst, abs(x - y))
    return worst
