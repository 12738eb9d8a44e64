"""Exit criteria, one test per criterion; each records a PASS/FAIL line."""

import random
import time
from fractions import Fraction
from pathlib import Path

import pytest

from conftest import ACCEPTANCE_LINES
from riesz_ergodic.cli import main
from riesz_ergodic.ergodic import (
    cesaro_trace,
    cesaro_utilities,
    classify_projections,
    ergodic_limit,
    geometric_cesaro_bound,
    geometric_sequence,
    is_ergodic_definition,
    is_ergodic_operator_equality,
    is_ergodic_tsm,
    product_criterion_on_indicators,
)
from riesz_ergodic.independence import slln_check
from riesz_ergodic.lattice import Element
from riesz_ergodic.mixing import is_weakly_mixing
from riesz_ergodic.operators import apply_S, apply_T
from riesz_ergodic.systems import enumerate_systems, random_element, random_systems, rotation

GOLDEN = Path(__file__).parent / "golden"
SEED = 20240601

ENUMERATED = list(enumerate_systems(4))
POPULATION = ENUMERATED + random_systems(SEED, 500, 8)


def record(criterion, ok, detail):
    ACCEPTANCE_LINES.append(f"[{'PASS' if ok else 'FAIL'}] {criterion}: {detail}")
    return ok


def test_population_shape():
    assert len({s.n for s in ENUMERATED}) == 4
    assert {s.name[5] for s in ENUMERATED if s.n > 1} == {"u", "w"}
    assert len(POPULATION) == len(ENUMERATED) + 500
    assert all(s.is_valid() for s in POPULATION)


def test_c1_birkhoff_properties():
    t0 = time.perf_counter()
    failures = []
    for sys in POPULATION:
        e = sys.space.unit()
        for f in sys.space.atom_indicators():
            L = ergodic_limit(sys, f)
            if not (apply_S(sys.S, L) == L and apply_T(sys.T, L) == apply_T(sys.T, f)
                    and ergodic_limit(sys, L) == L):
                failures.append(sys.describe())
        if ergodic_limit(sys, e) != e:
            failures.append(sys.describe())
    elapsed = time.perf_counter() - t0
    ok = not failures and elapsed < 60
    record("C1 Birkhoff SL=L, TL=T, L^2=L, Le=e", ok,
           f"{len(POPULATION)} systems, {len(failures)} failures, {elapsed:.1f}s (< 60s)")
    assert ok, failures[:5]


def test_c2_ergodicity_equivalences():
    disagreements = []
    ergodic = 0
    for sys in POPULATION:
        a = is_ergodic_definition(sys).ergodic
        b = is_ergodic_tsm(sys).ergodic
        c = is_ergodic_operator_equality(sys).ergodic
        ergodic += a
        if not a == b == c:
            disagreements.append(sys.describe())
    ok = not disagreements
    record("C2 definition <=> invariant means <=> T = L_S", ok,
           f"{len(POPULATION)} systems ({ergodic} ergodic), {len(disagreements)} disagreements")
    assert ok, disagreements[:5]


def test_c3_projection_classes():
    bad, strict = [], 0
    for sys in ENUMERATED:
        c = classify_projections(sys)
        strict += c.strict
        if not (c.inclusion_holds and c.equality_holds):
            bad.append(sys.describe())
    ok = not bad and strict >= 1
    record("C3 commuting ⊆ invariant = fixed", ok,
           f"{len(ENUMERATED)} systems n<=4, {len(bad)} violations, {strict} strict-inclusion witnesses")
    assert ok


def test_c4_product_criterion_both_directions():
    bad = []
    for sys in ENUMERATED:
        holds, _ = product_criterion_on_indicators(sys)
        if holds != is_ergodic_operator_equality(sys).ergodic:
            bad.append(sys.describe())
    ok = not bad
    record("C4 product criterion on all indicator pairs <=> T = L_S", ok,
           f"{len(ENUMERATED)} systems n<=4, {len(bad)} violations")
    assert ok, bad


def test_c5_mixing_implies_ergodic():
    violations, converse = [], 0
    for sys in POPULATION:
        mixing = is_weakly_mixing(sys).weakly_mixing
        ergodic = is_ergodic_operator_equality(sys).ergodic
        if mixing and not ergodic:
            violations.append(sys.describe())
        converse += ergodic and not mixing
    witness = rotation(2)
    r = is_weakly_mixing(witness)
    quarter = Element((Fraction(1, 4), Fraction(1, 4)))
    witness_ok = (is_ergodic_operator_equality(witness).ergodic and not r.weakly_mixing
                  and r.counterexample.average == quarter)
    ok = not violations and converse >= 1 and witness_ok
    record("C5 weakly mixing => ergodic", ok,
           f"{len(violations)} violations, {converse} ergodic-not-mixing systems; "
           f"rotation-2 period average = {r.counterexample.average}")
    assert ok


def test_c6_slln():
    """Horizon two periods of τ: the smallest truncation containing every residue pair."""
    violations, hypothesis = [], 0
    for sys in POPULATION:
        v = slln_check(sys, horizon=2 * sys.period, subset_cap=3)
        hypothesis += v.hypothesis
        if not v.consistent:
            violations.append(sys.describe())
    ok = not violations
    record("C6 independent shifts => T = L_S (horizon 2p, cap 3)", ok,
           f"{len(POPULATION)} systems, {hypothesis} satisfy the hypothesis, {len(violations)} violations")
    assert ok, violations[:5]


@pytest.mark.xfail(strict=True, reason="one period leaves no disjoint index pair when τ = id; "
                                       "the independence hypothesis then holds vacuously")
def test_c6_slln_one_period_horizon():
    violations = [s.describe() for s in POPULATION
                  if not slln_check(s, horizon=s.period, subset_cap=3).consistent]
    record("C6 as parameterized (horizon = p, cap 3)", not violations,
           f"{len(violations)} vacuous counterexamples, e.g. {violations[:1]}")
    assert not violations


def test_c7_iterative_convergence():
    rng = random.Random(SEED + 7)
    bad = 0
    checked = 0
    for sys in random_systems(SEED + 7, 200, 8):
        f = random_element(rng, sys.n)
        p = sys.period
        L = ergodic_limit(sys, f)
        bound_numerator = 2 * p * f.sup_norm()
        for n, mean in enumerate(cesaro_trace(sys, f, 10 * p).values, start=1):
            checked += 1
            if (mean - L).sup_norm() * n > bound_numerator:
                bad += 1
    ok = bad == 0
    record("C7 |S_n f - L_S f| <= 2 p |f| / n for n <= 10p", ok,
           f"200 pairs, {checked} (system, n) comparisons, {bad} violations")
    assert ok


@pytest.mark.parametrize("r", ["1/2", "9/10"])
def test_c8_cesaro_geometric(r):
    rng = random.Random(SEED + 8)
    v = random_element(rng, 4)
    out = cesaro_utilities(geometric_sequence(v, r, 10_000), v * 0, geometric_cesaro_bound(v, r))
    ok = out.holds and out.n_checked == 10_000
    record(f"C8 Cesàro of |r^k v| <= |v|/(n(1-r)), r={r}", ok,
           f"n <= {out.n_checked}, first violation {out.first_violation}")
    assert ok


def test_c9_cli_determinism(capsys):
    ok = True
    for name in ("rotation-3", "identity-2", "blockwise-swap-4"):
        outputs = []
        for _ in range(2):
            assert main(["run", "--config", str(GOLDEN / f"{name}.json"), "--seed", "0"]) == 0
            outputs.append(capsys.readouterr().out)
        golden = (GOLDEN / f"{name}.report.json").read_text()
        ok &= outputs[0] == outputs[1] == golden
    campaign = []
    for _ in range(2):
        main(["campaign", "--seed", "3", "--count", "20"])
        campaign.append(capsys.readouterr().out)
    ok &= campaign[0] == campaign[1]
    record("C9 byte-identical JSON reports and golden files", ok,
           "rotation-3, identity-2, blockwise-swap-4, campaign seed 3")
    assert ok
