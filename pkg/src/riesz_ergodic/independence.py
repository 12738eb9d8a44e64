"""T-conditional independence of band projections, subspaces and sequences.

A closed Riesz subspace containing ``R(T)`` is stored as a partition refining
the blocks of ``T``: its elements are the functions constant on each block,
and its band projections (those with ``Pe`` in the subspace) are the block
unions.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Sequence

from .ergodic import is_ergodic_definition, is_ergodic_operator_equality
from .lattice import BandProjection, CapExceeded, Element, project
from .operators import CEPSystem, CondExpectation, Partition, apply_S, apply_T

DEFAULT_SUBSET_CAP = 3
DEFAULT_HORIZON_CAP = 64


class MissingRange(ValueError):
    """A subspace was expected to contain the range of ``T``."""


@dataclass(frozen=True)
class ClosedSubspace:
    partition: Partition

    def contains_range(self, T: CondExpectation) -> bool:
        return self.partition.refines(T.partition)

    def projections(self) -> list[BandProjection]:
        return self.partition.block_unions()

    def contains(self, f: Element) -> bool:
        return all(len({f[i] for i in b}) == 1 for b in self.partition.blocks)

    def is_coarsening_of(self, other: "ClosedSubspace") -> bool:
        """``self ⊆ other`` as subspaces."""
        return other.partition.refines(self.partition)


def range_subspace(T: CondExpectation) -> ClosedSubspace:
    return ClosedSubspace(T.partition)


def generated_subspace(T: CondExpectation, generators: Iterable[Element]) -> ClosedSubspace:
    """``⟨F ∪ R(T)⟩``: the coarsest partition making every generator constant, joined with ``T``'s."""
    part = T.partition
    for g in generators:
        part = part.join(Partition.from_labels(g.coords))
    return ClosedSubspace(part)


def projections_independent(T: CondExpectation, P: BandProjection, Q: BandProjection) -> bool:
    """``TPTQe = TPQe``."""
    e = T.space.unit()
    lhs = apply_T(T, project(P, apply_T(T, project(Q, e))))
    return lhs == apply_T(T, project(P.compose(Q), e))


def projections_independent_other_side(T: CondExpectation, P: BandProjection, Q: BandProjection) -> bool:
    """``TPQe = TQTPe``, the equality :func:`projections_independent` does not test."""
    e = T.space.unit()
    rhs = apply_T(T, project(Q, apply_T(T, project(P, e))))
    return apply_T(T, project(P.compose(Q), e)) == rhs


@dataclass(frozen=True)
class SubspaceVerdict:
    independent: bool
    witness: tuple[BandProjection, BandProjection] | None = None
    pairs_checked: int = 0

    def __bool__(self):
        return self.independent


def subspaces_independent(T: CondExpectation, E1: ClosedSubspace, E2: ClosedSubspace) -> SubspaceVerdict:
    """Exhaustive check over the band projections of both subspaces.

    Raises:
        MissingRange: if either subspace does not contain ``R(T)``.
    """
    for name, E in (("E1", E1), ("E2", E2)):
        if not E.contains_range(T):
            raise MissingRange(f"{name} does not contain R(T)")
    checked = 0
    qs = E2.projections()
    for P in E1.projections():
        for Q in qs:
            checked += 1
            if not projections_independent(T, P, Q):
                return SubspaceVerdict(False, (P, Q), checked)
    return SubspaceVerdict(True, None, checked)


@dataclass(frozen=True)
class SequenceVerdict:
    independent: bool
    horizon: int
    subset_cap: int
    orbit_period: int
    subspace_pairs: int
    witness: tuple[tuple[int, ...], tuple[int, ...], BandProjection, BandProjection] | None = None

    def __bool__(self):
        return self.independent


def orbit_period(sys: CEPSystem, f: Element) -> int:
    """Least ``m >= 1`` with ``S^m f = f``."""
    g = apply_S(sys.S, f)
    m = 1
    while g != f:
        g = apply_S(sys.S, g)
        m += 1
    return m


def _subsets(items: Sequence[int], cap: int) -> list[tuple[int, ...]]:
    return [c for size in range(1, min(cap, len(items)) + 1) for c in combinations(items, size)]


def sequence_independence(
    sys: CEPSystem,
    f: Element,
    horizon: int | None = None,
    subset_cap: int = DEFAULT_SUBSET_CAP,
    horizon_cap: int = DEFAULT_HORIZON_CAP,
) -> SequenceVerdict:
    """Is ``(S^j f)_j`` T-conditionally independent?

    For every pair of disjoint nonempty index sets ``Λ1, Λ2 ⊆ {0..H-1}`` of
    size at most ``subset_cap``, the subspaces generated by the iterates
    indexed by each set (together with ``R(T)``) must be independent.

    ``H`` defaults to twice the period of ``τ``.  Iterates repeat with the
    orbit period ``m`` of ``f``, so a subspace depends only on the residues of
    its index set mod ``m``; once ``H >= 2m`` every pair of residue sets,
    including a set paired with itself, occurs for some disjoint pair of index
    sets, and the check runs over residue sets directly.  Subspace independence
    is symmetric, so pairs are unordered.

    Raises:
        CapExceeded: if the horizon exceeds ``horizon_cap``.
    """
    sys.require_valid()
    H = 2 * sys.period if horizon is None else horizon
    if H < 1:
        raise ValueError("horizon must be positive")
    if H > horizon_cap:
        raise CapExceeded(f"horizon {H} exceeds cap {horizon_cap}")
    m = orbit_period(sys, f)
    orbit = [f]
    for _ in range(m - 1):
        orbit.append(apply_S(sys.S, orbit[-1]))

    cache: dict[frozenset, ClosedSubspace] = {}

    def subspace(residues: frozenset) -> ClosedSubspace:
        if residues not in cache:
            cache[residues] = generated_subspace(sys.T, (orbit[r] for r in sorted(residues)))
        return cache[residues]

    if H >= 2 * m:
        sets = _subsets(range(m), subset_cap)
        index_pairs = (
            (a, tuple(r + m for r in b)) for i, a in enumerate(sets) for b in sets[i:]
        )
    else:
        sets = _subsets(range(H), subset_cap)
        index_pairs = (
            (a, b) for i, a in enumerate(sets) for b in sets[i + 1:] if not set(a) & set(b)
        )

    seen: set[tuple[frozenset, frozenset]] = set()
    for lam1, lam2 in index_pairs:
        key = (frozenset(j % m for j in lam1), frozenset(j % m for j in lam2))
        if key in seen:
            continue
        seen.add(key)
        verdict = subspaces_independent(sys.T, subspace(key[0]), subspace(key[1]))
        if not verdict:
            return SequenceVerdict(False, H, subset_cap, m, len(seen), (lam1, lam2) + verdict.witness)
    return SequenceVerdict(True, H, subset_cap, m, len(seen))


@dataclass(frozen=True)
class SLLNVerdict:
    hypothesis: bool
    limit_equals_T: bool
    ergodic: bool
    failing_atom: int | None = None
    witness: SequenceVerdict | None = None

    @property
    def consistent(self) -> bool:
        """Hypothesis implies the conclusions."""
        return not self.hypothesis or (self.limit_equals_T and self.ergodic)

    def __bool__(self):
        return self.consistent


def slln_check(
    sys: CEPSystem,
    horizon: int | None = None,
    subset_cap: int = DEFAULT_SUBSET_CAP,
) -> SLLNVerdict:
    """If every atom indicator generates an independent sequence, ``T = L_S`` must hold."""
    sys.require_valid()
    limit_eq = is_ergodic_operator_equality(sys).ergodic
    ergodic = is_ergodic_definition(sys).ergodic
    for i, f in enumerate(sys.space.atom_indicators()):
        verdict = sequence_independence(sys, f, horizon, subset_cap)
        if not verdict:
            return SLLNVerdict(False, limit_eq, ergodic, i, verdict)
    return SLLNVerdict(True, limit_eq, ergodic)
