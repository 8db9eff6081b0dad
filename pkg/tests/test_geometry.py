"""3D embedding, measure-back, self-intersection, bundles, OBJ export."""
import json
import math

import numpy as np
import pytest

from kokonet.errors import DegenerateQuad, EmbedInconsistent, KokonetError
from kokonet.geometry import (
    BundleSample,
    EdgeLengths,
    FACES,
    FlexionBundle,
    VERTEX_ORDER,
    build_central_quad,
    congruence_deviation,
    embed,
    export_bundle,
    export_obj,
    face_metrics,
    load_bundle,
    measure_dihedrals,
    measure_flat_angles,
    self_intersects,
)
from kokonet.kinematics import DihedralState, angle_distance
from kokonet.qsnet import QsSeed, build_qs_net, eval_flexion, qs_flexion

from paperdata import (
    ORTHO90_T_RANGE,
    QS_A_SEED_DEG,
    TABLE_A_DELTAS_DEG,
    ortho90_net,
    ortho90_state,
)

D2R = math.pi / 180.0


def fan(points):
    return np.array(points)


class TestCentralQuad:
    def test_unit_square(self):
        pts = build_central_quad([math.pi / 2] * 4, 1.0, 1.0)
        assert np.allclose(pts[1], [1, 0, 0])
        assert np.allclose(pts[2], [0, 0, 0])
        assert np.allclose(pts[3], [0, 1, 0], atol=1e-15)
        assert np.allclose(pts[4], [1, 1, 0], atol=1e-12)

    def measured_angles(self, pts):
        out = []
        for i in range(1, 5):
            prev = pts[(i - 2) % 4 + 1]
            nxt = pts[i % 4 + 1]
            u = prev - pts[i]
            v = nxt - pts[i]
            u = u / np.linalg.norm(u)
            v = v / np.linalg.norm(v)
            out.append(math.acos(max(-1.0, min(1.0, float(np.dot(u, v))))))
        return out

    def test_table_a_angles_measure_back(self):
        deltas = [d * D2R for d in TABLE_A_DELTAS_DEG]
        pts = build_central_quad(deltas)
        measured = self.measured_angles(pts)
        for a, b in zip(measured, deltas):
            assert a == pytest.approx(b, abs=1e-12)

    def test_near_degenerate(self):
        deltas = [170 * D2R, 170 * D2R, 10 * D2R, 10 * D2R]
        pts = build_central_quad(deltas)
        measured = self.measured_angles(pts)
        for a, b in zip(measured, deltas):
            assert a == pytest.approx(b, abs=1e-9)

    def test_bad_sum_rejected(self):
        with pytest.raises(DegenerateQuad):
            build_central_quad([math.pi / 2, math.pi / 2, math.pi / 2, math.pi / 3])


@pytest.fixture(scope="module")
def qs_a_setup():
    net = build_qs_net(QsSeed.from_degrees(*QS_A_SEED_DEG))
    fl = qs_flexion(net, +1)
    return net, fl


class TestEmbed:
    def test_measure_back(self, qs_a_setup):
        net, fl = qs_a_setup
        for t in (0.0, 0.5, 1.0):
            state = eval_flexion(fl, t)
            e = embed(net, state)
            m_state = measure_dihedrals(e)
            assert max(angle_distance(a, b)
                       for a, b in zip(m_state.theta, state.theta)) <= 1e-10
            m_net = measure_flat_angles(e)
            for i in range(1, 5):
                for attr in ("alpha", "beta", "gamma", "delta"):
                    assert getattr(m_net.germ(i), attr) == pytest.approx(
                        getattr(net.germ(i), attr), abs=1e-10)

    def test_wing_lengths_respected(self, qs_a_setup):
        net, fl = qs_a_setup
        lengths = EdgeLengths(a1a2=1.3, a2a3=0.8,
                              wing_b=(0.5, 0.6, 0.7, 0.8),
                              wing_c=(1.1, 1.2, 1.3, 1.4))
        state = eval_flexion(fl, 0.5)
        e = embed(net, state, lengths)
        for i in range(1, 5):
            b = np.linalg.norm(e.point(f"B{i}") - e.point(f"A{i}"))
            c = np.linalg.norm(e.point(f"C{i}") - e.point(f"A{i}"))
            assert b == pytest.approx(lengths.wing_b[i - 1], abs=1e-12)
            assert c == pytest.approx(lengths.wing_c[i - 1], abs=1e-12)

    def test_side_faces_planar(self, qs_a_setup):
        net, fl = qs_a_setup
        e = embed(net, eval_flexion(fl, 0.7))
        for name, face in FACES:
            pts = e.face_points(face)
            if len(pts) == 4:
                n = np.cross(pts[1] - pts[0], pts[2] - pts[0])
                n = n / np.linalg.norm(n)
                for p in pts:
                    assert abs(float(np.dot(p - pts[0], n))) <= 1e-9

    def test_non_closing_state_rejected(self, qs_a_setup):
        net, fl = qs_a_setup
        state = eval_flexion(fl, 0.5)
        broken = DihedralState((state.theta[0], state.theta[1] + 1e-3,
                                state.theta[2], state.theta[3]))
        with pytest.raises(EmbedInconsistent):
            embed(net, broken)

    def test_sign_convention_positive_thetas(self, qs_a_setup):
        # all example states keep theta in (0, pi): the orientation rule
        # det(n_i, n_0, A_{i+1}A_i) > 0 must hold at every embedded side face
        net, fl = qs_a_setup
        state = eval_flexion(fl, 0.5)
        e = embed(net, state)
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
        for i in range(1, 5):
            assert 0.0 < state.get(i) < math.pi
            det = np.linalg.det(np.array([normals[i], n0, A[i] - A[i % 4 + 1]]))
            assert det > 0.0


class TestSelfIntersection:
    def test_branch_difference(self):
        net = ortho90_net()
        lo, hi = ORTHO90_T_RANGE
        plus_flags, minus_flags = [], []
        for k in range(12):
            t = lo + (hi - lo) * (k + 0.5) / 12
            minus_flags.append(self_intersects(embed(net, ortho90_state(t, -1))))
            plus_flags.append(self_intersects(embed(net, ortho90_state(t, +1))))
        assert not any(minus_flags)
        assert any(plus_flags)

    def test_coplanar_disjoint_faces(self):
        # two separated coplanar squares, as a synthetic embedded-net stand-in
        from kokonet.geometry import _tri_tri_intersect

        t1 = np.array([[0, 0, 0], [1, 0, 0], [0, 1, 0]], dtype=float)
        t2 = t1 + np.array([5.0, 0.0, 0.0])
        assert not _tri_tri_intersect(t1, t2, 1e-9)
        t3 = t1 + np.array([0.2, 0.2, 0.0])
        assert _tri_tri_intersect(t1, t3, 1e-9)

    def test_touching_is_not_intersecting(self):
        from kokonet.geometry import _tri_tri_intersect

        t1 = np.array([[0, 0, 0], [1, 0, 0], [0, 1, 0]], dtype=float)
        # shares only the vertex (1,0,0), otherwise separated
        t2 = np.array([[1, 0, 0], [2, 0, 0], [1, 1, 0]], dtype=float)
        assert not _tri_tri_intersect(t1, t2, 1e-9)

    def test_crossing_triangles(self):
        from kokonet.geometry import _tri_tri_intersect

        t1 = np.array([[0, 0, 0], [1, 0, 0], [0, 1, 0]], dtype=float)
        t2 = np.array([[0.2, 0.2, -0.5], [0.2, 0.2, 0.5], [1.0, 1.0, 0.0]])
        assert _tri_tri_intersect(t1, t2, 1e-9)


class TestBundles:
    def make_bundle(self, n=4):
        net = build_qs_net(QsSeed.from_degrees(*QS_A_SEED_DEG))
        fl = qs_flexion(net, +1)
        bundle = FlexionBundle(net=net, lengths=EdgeLengths(), branch="+",
                               provenance="closed-form")
        for t in np.linspace(0.0, 1.0, n):
            state = eval_flexion(fl, float(t))
            bundle.samples.append(BundleSample(t=float(t), state=state,
                                               embedded=embed(net, state)))
        return bundle

    def test_round_trip_bitwise(self, tmp_path):
        bundle = self.make_bundle()
        path = str(tmp_path / "b.json")
        export_bundle(bundle, path)
        again = load_bundle(path)
        assert json.dumps(bundle.to_json_dict()) == json.dumps(again.to_json_dict())

    def test_schema_fields(self):
        d = self.make_bundle(2).to_json_dict()
        assert d["schema"] == "kokonet/flexion-bundle/1"
        assert set(d["net"]) == {"alpha", "beta", "gamma", "delta"}
        assert d["branch"] == "+"
        s = d["samples"][0]
        assert set(s) == {"t", "theta", "vertices"}
        assert len(s["theta"]) == 4
        assert set(s["vertices"]) == set(VERTEX_ORDER)

    def test_empty_bundle_round_trip(self, tmp_path):
        net = build_qs_net(QsSeed.from_degrees(*QS_A_SEED_DEG))
        bundle = FlexionBundle(net=net, lengths=EdgeLengths(), branch="-")
        path = str(tmp_path / "empty.json")
        export_bundle(bundle, path)
        again = load_bundle(path)
        assert again.samples == []
        assert congruence_deviation(again) == 0.0

    def test_schema_version_rejected(self, tmp_path):
        d = self.make_bundle(2).to_json_dict()
        d["schema"] = "kokonet/flexion-bundle/999"
        path = tmp_path / "bad.json"
        path.write_text(json.dumps(d))
        with pytest.raises(KokonetError):
            load_bundle(str(path))

    def test_congruence_across_samples(self):
        bundle = self.make_bundle(6)
        assert congruence_deviation(bundle) <= 1e-9

    def test_face_metrics_shape(self):
        bundle = self.make_bundle(1)
        metrics = face_metrics(bundle.samples[0].embedded)
        assert set(metrics) == {name for name, _ in FACES}
        assert len(metrics["central"][0]) == 4
        assert len(metrics["corner1"][0]) == 3


class TestObjExport:
    def test_header_and_structure(self, tmp_path):
        net = build_qs_net(QsSeed.from_degrees(*QS_A_SEED_DEG))
        fl = qs_flexion(net, +1)
        e = embed(net, eval_flexion(fl, 0.5))
        path = str(tmp_path / "net.obj")
        export_obj(e, path, net)
        lines = open(path).read().splitlines()
        assert lines[0].startswith("# kokonet flat-angles-deg:")
        vlines = [l for l in lines if l.startswith("v ")]
        flines = [l for l in lines if l.startswith("f ")]
        assert len(vlines) == 12
        assert len(flines) == 9
        # vertices in label order: A2 is the origin
        assert vlines[1].split()[1:4] == ["0", "0", "0"]
        # face lines reference valid 1-based indices
        for l in flines:
            idx = [int(tok) for tok in l.split()[1:] if tok.isdigit()]
            assert all(1 <= i <= 12 for i in idx)
