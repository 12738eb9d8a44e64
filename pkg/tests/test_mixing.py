import pytest
from hypothesis import given, settings

from conftest import frac_list as E, system_and_element, systems
from riesz_ergodic.ergodic import is_ergodic_operator_equality
from riesz_ergodic.lattice import BandProjection, CapExceeded, enumerate_band_projections
from riesz_ergodic.mixing import (
    is_weakly_mixing,
    mixing_implies_ergodic_campaign,
    mixing_structure_holds,
    weak_mixing_fg,
    weak_mixing_term,
)
from riesz_ergodic.systems import (
    blockwise_swap_4,
    discrete,
    enumerate_systems,
    random_systems,
    rotation,
)

EMPTY = BandProjection(set())
ATOM0 = BandProjection({0})


class TestTerm:
    def test_empty_projection(self):
        sys = rotation(3)
        for k in range(4):
            assert weak_mixing_term(sys, EMPTY, ATOM0, k).is_zero()
            assert weak_mixing_term(sys, ATOM0, EMPTY, k).is_zero()

    def test_rotation_2(self):
        sys = rotation(2)
        for k in range(4):
            assert weak_mixing_term(sys, ATOM0, ATOM0, k) == E("1/4", "1/4")

    def test_whole_space(self):
        omega = BandProjection({0, 1, 2})
        assert weak_mixing_term(rotation(3), omega, omega, 5).is_zero()

    def test_negative_lag(self):
        with pytest.raises(ValueError):
            weak_mixing_term(rotation(2), ATOM0, ATOM0, -1)

    @settings(max_examples=40)
    @given(systems(max_atoms=5))
    def test_nonnegative_and_periodic(self, sys):
        p = sys.period
        projections = enumerate_band_projections(sys.space)[:6]
        for P in projections:
            for Q in projections:
                for k in range(2):
                    t = weak_mixing_term(sys, P, Q, k)
                    assert t.is_positive()
                    assert weak_mixing_term(sys, P, Q, k + p) == t


class TestVerdict:
    def test_discrete(self):
        r = is_weakly_mixing(discrete(3))
        assert r.weakly_mixing and r.mode == "exhaustive" and r.pairs_checked == 64

    def test_rotation_2(self):
        r = is_weakly_mixing(rotation(2))
        assert not r.weakly_mixing
        cx = r.counterexample
        assert (cx.P, cx.Q) == (ATOM0, ATOM0)
        assert cx.average == E("1/4", "1/4")

    def test_blockwise_swap(self):
        cx = is_weakly_mixing(blockwise_swap_4()).counterexample
        assert (cx.P, cx.Q) == (ATOM0, ATOM0)
        assert cx.average == E("1/4", "1/4", 0, 0)

    def test_records_match_literal_terms(self):
        sys = blockwise_swap_4()
        sys_mixing = discrete(2)
        for s in (sys, sys_mixing):
            r = is_weakly_mixing(s, keep_records=True)
            for rec in r.records:
                total = s.space.zero()
                for k in range(rec.period):
                    total = total + weak_mixing_term(s, rec.P, rec.Q, k)
                assert total / rec.period == rec.average
                assert rec.average.is_positive()

    def test_cap_and_sampling(self):
        sys = discrete(10)
        with pytest.raises(CapExceeded):
            is_weakly_mixing(sys)
        r = is_weakly_mixing(sys, sampled=True, samples=20, seed=3)
        assert r.mode == "sampled" and r.weakly_mixing and r.pairs_checked == 20
        big_rotation = rotation(10)
        r = is_weakly_mixing(big_rotation, sampled=True, samples=50, seed=3)
        assert not r.weakly_mixing and not r.atom_basis_verdict

    @pytest.mark.parametrize("sys", list(enumerate_systems(4)), ids=lambda s: s.describe())
    def test_two_forms_agree(self, sys):
        r = is_weakly_mixing(sys)
        ind = sys.space.atom_indicators()
        fg_form = all(weak_mixing_fg(sys, f, g).is_zero() for f in ind for g in ind)
        assert r.weakly_mixing == fg_form == r.atom_basis_verdict

    @pytest.mark.slow
    def test_mixing_iff_identity_conditional_expectation(self):
        for sys in enumerate_systems(5):
            assert mixing_structure_holds(sys)


class TestFG:
    @given(system_and_element(max_atoms=6))
    def test_unit_f(self, case):
        sys, g = case
        assert weak_mixing_fg(sys, sys.space.unit(), g).is_zero()

    @given(system_and_element(max_atoms=6))
    def test_unit_g(self, case):
        sys, f = case
        assert weak_mixing_fg(sys, f, sys.space.unit()).is_zero()

    def test_rotation_2(self):
        assert weak_mixing_fg(rotation(2), E(1, 0), E(1, 0)) == E("1/4", "1/4")


class TestCampaign:
    def test_exhaustive_small(self):
        out = mixing_implies_ergodic_campaign(enumerate_systems(4))
        assert out.violations == []
        assert out.checked == len(list(enumerate_systems(4)))
        assert any(s.startswith("enum-u2") for s in out.ergodic_not_mixing)

    def test_discrete_both(self):
        sys = discrete(3)
        assert is_weakly_mixing(sys) and is_ergodic_operator_equality(sys)

    def test_rotation_one_way(self):
        out = mixing_implies_ergodic_campaign([rotation(2)])
        assert out.violations == [] and out.ergodic == 1 and out.mixing == 0
        assert out.ergodic_not_mixing == [rotation(2).describe()]

    def test_random(self):
        out = mixing_implies_ergodic_campaign(random_systems(11, 60, 7))
        assert out.violations == [] and out.checked == 60
