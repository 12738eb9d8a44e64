import random
from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, settings

from conftest import elements, frac_list as E, system_and_element, systems
from riesz_ergodic.lattice import AtomicMeasureSpace, enumerate_band_projections, project
from riesz_ergodic.operators import (
    CEPSystem,
    CompositionOperator,
    CondExpectation,
    InvalidSystem,
    NotInRange,
    Partition,
    apply_S,
    apply_T,
    averaging_identity_check,
    range_T_membership,
    structural_characterization,
    validate_ceps,
)
from riesz_ergodic.systems import nonuniform_profile, random_map_system, set_partitions


def T_matrix_oracle(space, partition, f):
    """Row i of T is μ_j / μ(B(i)) on the block of i, zero elsewhere."""
    n = space.atom_count
    blocks = [next(b for b in partition.blocks if i in b) for i in range(n)]
    rows = []
    for i in range(n):
        mass = sum(space.weights[j] for j in blocks[i])
        rows.append([space.weights[j] / mass if j in blocks[i] else Fraction(0) for j in range(n)])
    return E(*(sum(r[j] * f[j] for j in range(n)) for r in rows))


def ceps_by_definition(space, T, S):
    """TSPe = TPe for every band projection P."""
    e = space.unit()
    return all(apply_T(T, apply_S(S, project(P, e))) == apply_T(T, project(P, e))
               for P in enumerate_band_projections(space))


class TestPartition:
    @pytest.mark.parametrize("blocks", [((0, 1), (1, 2)), ((0,), (2,)), ((0, 1), ())])
    def test_rejects(self, blocks):
        with pytest.raises(ValueError):
            Partition(blocks)

    def test_canonical(self):
        assert Partition(((2, 0), (1,))).blocks == ((0, 2), (1,))

    def test_join_and_refine(self):
        a = Partition(((0, 1), (2, 3)))
        b = Partition(((0, 2), (1, 3)))
        assert a.join(b) == Partition.singletons(4)
        assert Partition.singletons(4).refines(a)
        assert not a.refines(b)

    def test_set_partition_counts(self):
        assert [sum(1 for _ in set_partitions(n)) for n in range(1, 6)] == [1, 2, 5, 15, 52]


class TestApplyT:
    def test_singletons_identity(self):
        space = AtomicMeasureSpace.uniform(3)
        T = CondExpectation(space, Partition.singletons(3))
        assert apply_T(T, E(4, -1, "2/3")) == E(4, -1, "2/3")

    def test_full_mean(self):
        space = AtomicMeasureSpace.uniform(3)
        T = CondExpectation(space, Partition.trivial(3))
        assert apply_T(T, E(3, 0, 0)) == E(1, 1, 1)

    def test_weighted_blocks(self):
        space = AtomicMeasureSpace(("1/4", "1/4", "1/2"))
        T = CondExpectation(space, Partition(((0, 1), (2,))))
        assert apply_T(T, E(1, 3, 5)) == E(2, 2, 5)

    @given(system_and_element())
    def test_matrix_oracle(self, case):
        sys, f = case
        assert apply_T(sys.T, f) == T_matrix_oracle(sys.space, sys.partition, f)

    @given(system_and_element())
    def test_projection_positive_unit(self, case):
        sys, f = case
        T = sys.T
        assert apply_T(T, apply_T(T, f)) == apply_T(T, f)
        assert apply_T(T, sys.space.unit()) == sys.space.unit()
        assert apply_T(T, abs(f)).is_positive()
        assert range_T_membership(T, apply_T(T, f))

    @given(system_and_element())
    def test_strictly_positive(self, case):
        sys, f = case
        g = abs(f)
        assert apply_T(sys.T, g).is_zero() == g.is_zero()
        for ind in sys.space.atom_indicators():
            assert not apply_T(sys.T, ind).is_zero()


class TestApplyS:
    def test_identity(self):
        assert apply_S(CompositionOperator.identity(3), E(1, 2, 3)) == E(1, 2, 3)

    def test_rotation(self):
        assert apply_S(CompositionOperator((1, 2, 0)), E(3, 0, 0)) == E(0, 0, 3)

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            CompositionOperator((0, 3, 1))

    @given(elements(5), elements(5))
    def test_riesz_homomorphism(self, f, g):
        S = CompositionOperator((3, 3, 0, 4, 1))  # arbitrary, not bijective
        assert apply_S(S, f | g) == apply_S(S, f) | apply_S(S, g)
        assert apply_S(S, f & g) == apply_S(S, f) & apply_S(S, g)
        assert apply_S(S, E(1, 1, 1, 1, 1)) == E(1, 1, 1, 1, 1)
        assert apply_S(S, f) == E(*(f[t] for t in S.tau))

    def test_cycles_and_period(self):
        S = CompositionOperator((1, 2, 0, 4, 3, 5))
        assert S.cycles == ((0, 1, 2), (3, 4), (5,))
        assert S.period == 6
        assert S.power(6) == CompositionOperator.identity(6)

    def test_cycles_need_bijection(self):
        with pytest.raises(InvalidSystem):
            CompositionOperator((0, 0)).cycles


class TestValidate:
    def test_full_expectation_any_permutation(self):
        for tau in [(0, 1, 2), (1, 2, 0), (2, 1, 0), (0, 2, 1)]:
            sys = CEPSystem.build(["1/3"] * 3, [(0, 1, 2)], tau)
            assert sys.validation.valid

    def test_blockwise_swap(self):
        assert CEPSystem.build(["1/4"] * 4, [(0, 1), (2, 3)], (1, 0, 3, 2)).validation.valid

    def test_crossing_blocks(self):
        sys = CEPSystem.build(["1/4"] * 4, [(0, 1), (2, 3)], (2, 1, 0, 3))
        r = sys.validation
        assert not r.valid and not r.structural
        assert r.witness.mask == {0}
        # S e_0 is the indicator of τ⁻¹(0) = {2}
        assert r.lhs == E(0, 0, "1/2", "1/2") and r.rhs == E("1/2", "1/2", 0, 0)
        with pytest.raises(InvalidSystem):
            sys.require_valid()

    def test_non_bijective_accepted_then_rejected(self):
        sys = CEPSystem.build(["1/2", "1/2"], [(0, 1)], (0, 0))
        assert not sys.is_valid()
        assert "bijection" in sys.validation.explanation

    def test_weight_changing_permutation(self):
        sys = CEPSystem.build(["1/3", "2/3"], [(0, 1)], (1, 0))
        assert not sys.is_valid()
        assert "weight" in sys.validation.explanation

    def test_atoms_agree_with_exhaustive(self):
        rng = random.Random(7)
        for _ in range(60):
            sys = random_map_system(rng, max_atoms=12)
            fast = validate_ceps(sys.space, sys.T, sys.S)
            full = validate_ceps(sys.space, sys.T, sys.S, exhaustive=True)
            assert fast.valid == full.valid == fast.structural

    @settings(max_examples=50)
    @given(systems(max_atoms=10))
    def test_generated_systems_valid(self, sys):
        assert validate_ceps(sys.space, sys.T, sys.S, exhaustive=sys.n <= 8).valid

    @pytest.mark.slow
    def test_structure_matches_definition_exhaustively(self):
        for n in range(1, 6):
            profiles = [tuple(Fraction(1, n) for _ in range(n))]
            if 1 < n <= 4:
                profiles.append(nonuniform_profile(n))
            for weights in profiles:
                space = AtomicMeasureSpace(weights)
                for part in set_partitions(n):
                    T = CondExpectation(space, part)
                    for tau in product(range(n), repeat=n):
                        S = CompositionOperator(tau)
                        ok, _ = structural_characterization(space, part, S)
                        assert ok == validate_ceps(space, T, S).valid
                        if ok or n <= 3:
                            assert ok == ceps_by_definition(space, T, S)


class TestAveraging:
    def setup_method(self):
        space = AtomicMeasureSpace.uniform(3)
        self.T = CondExpectation(space, Partition(((0, 1), (2,))))

    def test_unit(self):
        assert averaging_identity_check(self.T, E(1, 1, 1), E(3, -2, 5))

    def test_constant_multiple(self):
        assert averaging_identity_check(self.T, E("5/2", "5/2", "5/2"), E(3, -2, 5))

    @given(elements(3))
    def test_block_constant(self, g):
        assert averaging_identity_check(self.T, E(2, 2, 5), g)

    def test_not_in_range(self):
        with pytest.raises(NotInRange):
            averaging_identity_check(self.T, E(1, 2, 3), E(1, 1, 1))

    @given(system_and_element())
    def test_random_systems(self, case):
        sys, g = case
        f = apply_T(sys.T, g * g)  # any element of R(T)
        assert averaging_identity_check(sys.T, f, g)


class TestRangeMembership:
    def test_examples(self):
        space = AtomicMeasureSpace.uniform(2)
        T = CondExpectation(space, Partition.trivial(2))
        assert range_T_membership(T, E(1, 1))
        assert not range_T_membership(T, E(1, 2))
        D = CondExpectation(space, Partition.singletons(2))
        assert range_T_membership(D, E(1, 2))
