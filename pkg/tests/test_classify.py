"""Equimodular elliptic classification, strip switches, exclusivity screens."""
import math

import numpy as np
import pytest

from kokonet.angles import VertexGermAngles, complement_net, derive, net_from_germs
from kokonet.classify import (
    StripSide,
    classify,
    exclusivity,
    strip_dihedral_index,
    switch_strip,
    switch_state,
)
from kokonet.elliptic import EllipticContext, sn_vertical_sq
from kokonet.qsnet import QsSeed, build_qs_net

from paperdata import (
    ORTHO90_T_RANGE,
    QS_A_SEED_DEG,
    TABLE_A_ANGLES_DEG,
    TABLE_A_DELTAS_DEG,
    TABLE_B_ANGLES_DEG,
    TABLE_B_DELTAS_DEG,
    ortho90_net,
    ortho90_state,
    qs_a_state,
    random_qs_seed,
    table_net,
)


def ortho90_samples(n=12, branch=-1):
    lo, hi = ORTHO90_T_RANGE
    return [ortho90_state(lo + (hi - lo) * (k + 0.5) / n, branch) for k in range(n)]


class TestClassify:
    def test_ortho90_verdict_and_phase_sums(self):
        net = ortho90_net()
        rep = classify(net)
        assert rep.verdict
        assert rep.modulus == pytest.approx(0.5, abs=1e-12)
        assert all(t.m == 0 for t in rep.phase_shifts)
        ctx = EllipticContext.from_modulus(rep.modulus)
        t = [ps.as_complex(ctx) for ps in rep.phase_shifts]
        # complementary pairs: t2 + t3 = t1 + t4 = i K'
        assert abs(t[1] + t[2] - 1j * ctx.K_prime) <= 1e-10
        assert abs(t[0] + t[3] - 1j * ctx.K_prime) <= 1e-10
        assert abs(t[0] - t[1] - t[2] + t[3]) <= 1e-10
        assert rep.period_residual <= 1e-10

    def test_ortho90_product_identity(self):
        # k^2 sn^2(t_2) sn^2(t_3) = 1 for the complementary pair
        net = ortho90_net()
        rep = classify(net)
        ctx = EllipticContext.from_modulus(rep.modulus)
        k2 = ctx.k ** 2
        prod = (sn_vertical_sq(rep.phase_shifts[1], ctx)
                * sn_vertical_sq(rep.phase_shifts[2], ctx))
        assert k2 * prod == pytest.approx(1.0, abs=1e-10)

    def test_table_a_verdict(self):
        net = table_net(TABLE_A_ANGLES_DEG, TABLE_A_DELTAS_DEG)
        rep = classify(net, tol=1e-3)  # two-decimal published angles
        assert rep.verdict
        assert rep.modulus == pytest.approx(0.92, abs=1e-2)

    def test_table_b_verdict(self):
        net = table_net(TABLE_B_ANGLES_DEG, TABLE_B_DELTAS_DEG)
        rep = classify(net, tol=1e-3)
        assert rep.verdict
        assert rep.modulus == pytest.approx(1.22, abs=1e-2)

    def test_perturbed_net_fails_moduli(self):
        germs = list(ortho90_net().vertices)
        g = germs[0]
        germs[0] = VertexGermAngles(g.alpha, g.beta + math.radians(1.0),
                                    g.gamma, g.delta)
        rep = classify(net_from_germs(germs), tol=1e-9)
        assert not rep.moduli_equal
        assert rep.moduli_max_deviation > 1e-3
        assert not rep.verdict

    def test_invariant_under_complement(self):
        rng = np.random.default_rng(19)
        for _ in range(20):
            net = build_qs_net(random_qs_seed(rng))
            rep1 = classify(net)
            rep2 = classify(complement_net(net))
            assert rep1.verdict and rep2.verdict
        netq = ortho90_net()
        assert classify(complement_net(netq)).verdict

    def test_report_json_fields(self):
        d = classify(ortho90_net()).to_json_dict()
        for key in ("elliptic", "moduli_equal", "amplitudes_match", "phase_shifts",
                    "period_signs", "period_residual", "verdict"):
            assert key in d
        assert len(d["phase_shifts"]) == 4
        assert len(d["period_signs"]) == 3

    def test_non_elliptic_reported(self):
        g = VertexGermAngles.from_degrees(90.0, 90.0, 90.0, 90.0)
        rep = classify(net_from_germs([g, g, g, g]))
        assert not rep.elliptic and not rep.verdict
        assert "NotElliptic" in rep.failure


class TestSwitchStrip:
    def test_right_quadruple(self):
        net = ortho90_net()
        sw = switch_strip(net, StripSide.RIGHT)
        for i in (1, 4):
            assert sw.germ(i).beta == pytest.approx(math.pi - net.germ(i).beta)
            assert sw.germ(i).gamma == pytest.approx(math.pi - net.germ(i).gamma)
            assert sw.germ(i).alpha == net.germ(i).alpha
            assert sw.germ(i).delta == net.germ(i).delta
        assert sw.germ(2) == net.germ(2)
        assert sw.germ(3) == net.germ(3)
        assert strip_dihedral_index(StripSide.RIGHT) == 4

    def test_involution(self):
        net = table_net(TABLE_A_ANGLES_DEG, TABLE_A_DELTAS_DEG)
        for side in StripSide:
            back = switch_strip(switch_strip(net, side), side)
            for i in range(1, 5):
                for attr in ("alpha", "beta", "gamma", "delta"):
                    assert getattr(back.germ(i), attr) == pytest.approx(
                        getattr(net.germ(i), attr), abs=5e-16)

    def test_modulus_invariant(self):
        net = table_net(TABLE_A_ANGLES_DEG, TABLE_A_DELTAS_DEG)
        M0 = [derive(g).M for g in net.vertices]
        for side in StripSide:
            sw = switch_strip(net, side)
            for i in range(1, 5):
                assert derive(sw.germ(i)).M == pytest.approx(M0[i - 1], abs=1e-12)

    def test_top_switch_linear_compound_constancy(self):
        # the base flexion has cot(t1/2) cot(t3/2) = 1; switching the strip
        # on edge A1A2 shifts theta_1 by pi, turning the constant product
        # into a constant ratio: the switched net satisfies the linear
        # compound relation either way
        samples = ortho90_samples()
        switched = [switch_state(s, [StripSide.TOP]) for s in samples]
        ratios = [s.cot_half(1) / s.cot_half(3) for s in switched]
        products = [s.cot_half(1) * s.cot_half(3) for s in switched]
        r_var = max(ratios) - min(ratios)
        p_var = max(products) - min(products)
        assert min(r_var, p_var) <= 1e-12
        # and in the unswitched samples the product is the constant one
        base_products = [s.cot_half(1) * s.cot_half(3) for s in samples]
        assert max(base_products) - min(base_products) <= 1e-12
        assert base_products[0] == pytest.approx(1.0, abs=1e-12)


class TestExclusivity:
    def test_qs_a_rules_out_everything(self):
        net = build_qs_net(QsSeed.from_degrees(*QS_A_SEED_DEG))
        samples = [qs_a_state(t) for t in np.linspace(-1.5, 1.5, 11)]
        rep = exclusivity(net, samples)
        assert rep.orthodiagonal_ruled_out
        assert rep.conjugate_modular_ruled_out
        assert rep.trivial_ruled_out
        assert rep.linear_compound_ruled_out
        assert rep.strip_variants_checked == 16
        assert rep.all_other_classes_ruled_out()

    def test_ortho90_is_linear_compound(self):
        net = ortho90_net()
        rep = exclusivity(net, ortho90_samples())
        assert not rep.linear_compound_ruled_out
        assert rep.orthodiagonal_ruled_out
        assert rep.conjugate_modular_ruled_out
        assert rep.trivial_ruled_out

    def test_table_b_conjugate_modular(self):
        # all moduli equal M = 1.22 != 2, so 1/M + 1/M != 1 at every vertex
        net = table_net(TABLE_B_ANGLES_DEG, TABLE_B_DELTAS_DEG)
        Ms = [derive(g).M for g in net.vertices]
        assert all(abs(1 / Ms[i] + 1 / Ms[(i + 1) % 4] - 1.0) > 1e-6
                   for i in range(4))

    def test_requires_enough_samples(self):
        net = ortho90_net()
        with pytest.raises(ValueError):
            exclusivity(net, ortho90_samples()[:5])
