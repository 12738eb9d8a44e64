"""Conditional expectations, composition operators and preserving systems."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from math import lcm
from typing import Iterable, Sequence

from .lattice import (
    AtomicMeasureSpace,
    BandProjection,
    DimensionMismatch,
    Element,
    enumerate_band_projections,
    project,
)


class InvalidSystem(ValueError):
    """The quadruple does not satisfy ``TSf = Tf`` for every ``f``."""


class NotInRange(ValueError):
    """An element expected to lie in the range of ``T`` does not."""


@dataclass(frozen=True)
class Partition:
    """Disjoint nonempty blocks of atom indices covering ``0..n-1``.

    Blocks are stored canonically: each sorted, ordered by smallest atom.
    """

    blocks: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        blocks = [tuple(sorted(b)) for b in self.blocks]
        if any(not b for b in blocks):
            raise ValueError("partition blocks must be nonempty")
        seen: list[int] = [i for b in blocks for i in b]
        if len(seen) != len(set(seen)):
            raise ValueError("partition blocks must be disjoint")
        n = len(seen)
        if set(seen) != set(range(n)):
            raise ValueError(f"partition must cover atoms 0..{n - 1}")
        object.__setattr__(self, "blocks", tuple(sorted(blocks)))

    @classmethod
    def singletons(cls, n: int) -> "Partition":
        return cls(tuple((i,) for i in range(n)))

    @classmethod
    def trivial(cls, n: int) -> "Partition":
        return cls((tuple(range(n)),))

    @classmethod
    def from_labels(cls, values: Sequence) -> "Partition":
        """Level-set partition: atoms are grouped by equal ``values[i]``."""
        groups: dict = {}
        for i, v in enumerate(values):
            groups.setdefault(v, []).append(i)
        return cls(tuple(tuple(g) for g in groups.values()))

    @property
    def atom_count(self) -> int:
        return sum(len(b) for b in self.blocks)

    @cached_property
    def block_of(self) -> tuple[int, ...]:
        out = [0] * self.atom_count
        for k, b in enumerate(self.blocks):
            for i in b:
                out[i] = k
        return tuple(out)

    def refines(self, other: "Partition") -> bool:
        """True if every block of ``self`` sits inside a block of ``other``."""
        return all(len({other.block_of[i] for i in b}) == 1 for b in self.blocks)

    def join(self, other: "Partition") -> "Partition":
        """Coarsest common refinement."""
        return Partition.from_labels(list(zip(self.block_of, other.block_of)))

    def is_singletons(self) -> bool:
        return all(len(b) == 1 for b in self.blocks)

    def block_unions(self) -> list[BandProjection]:
        """Band projections whose masks are unions of blocks, i.e. ``Pe`` is block-constant."""
        out = []
        for code in range(1 << len(self.blocks)):
            mask = frozenset(
                i for k, b in enumerate(self.blocks) if code >> k & 1 for i in b
            )
            out.append(BandProjection(mask))
        return sorted(out, key=lambda P: (len(P.mask), P.sorted_atoms()))


@dataclass(frozen=True)
class CondExpectation:
    """The weighted block average ``(Tf)_i = Σ_{j∈B(i)} μ_j f_j / μ(B(i))``."""

    space: AtomicMeasureSpace
    partition: Partition

    def __post_init__(self):
        if self.partition.atom_count != self.space.atom_count:
            raise DimensionMismatch("partition and space disagree on the atom count")

    @cached_property
    def _block_mass(self) -> tuple[Fraction, ...]:
        return tuple(self.space.measure(b) for b in self.partition.blocks)

    def __call__(self, f: Element) -> Element:
        return apply_T(self, f)

    def is_identity(self) -> bool:
        return self.partition.is_singletons()


@dataclass(frozen=True)
class CompositionOperator:
    """``(Sf)_i = f_{τ(i)}`` for a total map ``τ`` on the atoms."""

    tau: tuple[int, ...]

    def __post_init__(self):
        tau = tuple(int(t) for t in self.tau)
        n = len(tau)
        if any(not 0 <= t < n for t in tau):
            raise ValueError(f"tau must map atoms 0..{n - 1} into themselves")
        object.__setattr__(self, "tau", tau)

    @classmethod
    def identity(cls, n: int) -> "CompositionOperator":
        return cls(tuple(range(n)))

    @classmethod
    def from_cycles(cls, n: int, cycles: Iterable[Sequence[int]]) -> "CompositionOperator":
        """Map each listed atom to the next one in its cycle; unlisted atoms are fixed."""
        tau = list(range(n))
        for c in cycles:
            for a, b in zip(c, list(c[1:]) + [c[0]]):
                tau[a] = b
        return cls(tuple(tau))

    def __call__(self, f: Element) -> Element:
        return apply_S(self, f)

    def __len__(self):
        return len(self.tau)

    def is_bijective(self) -> bool:
        return len(set(self.tau)) == len(self.tau)

    def power(self, k: int) -> "CompositionOperator":
        # S^k f = f ∘ τ^k
        idx = list(range(len(self.tau)))
        for _ in range(k):
            idx = [self.tau[i] for i in idx]
        return CompositionOperator(tuple(idx))

    @cached_property
    def cycles(self) -> tuple[tuple[int, ...], ...]:
        """Cycle decomposition, each cycle starting at its smallest atom.

        Only defined for bijections.
        """
        if not self.is_bijective():
            raise InvalidSystem("cycle decomposition needs a bijective tau")
        seen = set()
        out = []
        for start in range(len(self.tau)):
            if start in seen:
                continue
            cyc = [start]
            seen.add(start)
            nxt = self.tau[start]
            while nxt != start:
                cyc.append(nxt)
                seen.add(nxt)
                nxt = self.tau[nxt]
            out.append(tuple(cyc))
        return tuple(out)

    @property
    def period(self) -> int:
        """Least common multiple of the cycle lengths."""
        return lcm(*(len(c) for c in self.cycles))


def apply_T(T: CondExpectation, f: Element) -> Element:
    if len(f) != T.space.atom_count:
        raise DimensionMismatch(f"element has {len(f)} atoms, space has {T.space.atom_count}")
    w = T.space.weights
    c = f.coords
    out = [Fraction(0)] * len(c)
    for block, mass in zip(T.partition.blocks, T._block_mass):
        terms = [w[j] * c[j] for j in block if c[j]]
        if not terms:
            continue
        avg = sum(terms) / mass
        for j in block:
            out[j] = avg
    return f._new(out)


def apply_S(S: CompositionOperator, f: Element) -> Element:
    if len(f) != len(S.tau):
        raise DimensionMismatch(f"element has {len(f)} atoms, tau has {len(S.tau)}")
    c = f.coords
    return f._new(c[t] for t in S.tau)


def range_T_membership(T: CondExpectation, f: Element) -> bool:
    """``f ∈ R(T)``: constant on every block."""
    return all(len({f[i] for i in b}) == 1 for b in T.partition.blocks)


def averaging_identity_check(T: CondExpectation, f: Element, g: Element) -> bool:
    """Check ``T(f·g) = f·Tg`` exactly, for ``f`` in the range of ``T``."""
    if not range_T_membership(T, f):
        raise NotInRange("averaging identity needs f constant on the blocks of T")
    return apply_T(T, f * g) == f * apply_T(T, g)


def structural_characterization(
    space: AtomicMeasureSpace, partition: Partition, S: CompositionOperator
) -> tuple[bool, str]:
    """Does ``τ`` permute each block of the partition and preserve weights?

    Returns the verdict with a human-readable reason.
    """
    block_of = partition.block_of
    for i, t in enumerate(S.tau):
        if block_of[i] != block_of[t]:
            return False, f"tau sends atom {space.label(i)} to {space.label(t)} in another block"
    if not S.is_bijective():
        missed = sorted(set(range(len(S.tau))) - set(S.tau))
        return False, f"tau is not a bijection; atom {space.label(missed[0])} has no preimage"
    w = space.weights
    for i, t in enumerate(S.tau):
        if w[i] != w[t]:
            return False, (
                f"tau sends atom {space.label(i)} (weight {w[i]}) to "
                f"{space.label(t)} (weight {w[t]})"
            )
    return True, "tau permutes every block and preserves weights"


@dataclass(frozen=True)
class ValidationReport:
    valid: bool
    method: str
    structural: bool
    explanation: str
    witness: BandProjection | None = None
    lhs: Element | None = None  # T S (witness)e
    rhs: Element | None = None  # T (witness)e
    checks: int = 0

    def __bool__(self):
        return self.valid


def validate_ceps(
    space: AtomicMeasureSpace,
    T: CondExpectation,
    S: CompositionOperator,
    exhaustive: bool = False,
) -> ValidationReport:
    """Check ``TSPe = TPe``.

    By default only atom indicators are tested; they span the space and the
    condition is linear.  ``exhaustive=True`` tests all ``2**n`` band
    projections instead.
    """
    n = space.atom_count
    if T.space != space or len(S.tau) != n:
        raise DimensionMismatch("T, S and the space disagree on the atom count")
    if exhaustive:
        projections = enumerate_band_projections(space)
    else:
        projections = [BandProjection(frozenset([i])) for i in range(n)]
    structural, reason = structural_characterization(space, T.partition, S)
    e = space.unit()
    for count, P in enumerate(projections, start=1):
        Pe = project(P, e)
        lhs = apply_T(T, apply_S(S, Pe))
        rhs = apply_T(T, Pe)
        if lhs != rhs:
            return ValidationReport(
                False, "exhaustive" if exhaustive else "atoms", structural, reason,
                P, lhs, rhs, count,
            )
    return ValidationReport(
        True, "exhaustive" if exhaustive else "atoms", structural, reason, checks=len(projections)
    )


@dataclass(frozen=True)
class CEPSystem:
    """The quadruple ``(E, T, S, e)`` with ``e`` the all-ones vector.

    Construction does not validate; invalid maps are accepted so the checker
    can be run on them.  Operations that need a valid system call
    :meth:`require_valid`.
    """

    space: AtomicMeasureSpace
    T: CondExpectation
    S: CompositionOperator
    name: str = field(default="", compare=False)

    def __post_init__(self):
        if self.T.space != self.space:
            raise DimensionMismatch("T is defined on a different space")
        if len(self.S.tau) != self.space.atom_count:
            raise DimensionMismatch("tau and the space disagree on the atom count")

    @classmethod
    def build(
        cls,
        weights: Sequence,
        blocks: Sequence[Sequence[int]],
        tau: Sequence[int],
        labels: Sequence[str] | None = None,
        name: str = "",
    ) -> "CEPSystem":
        space = AtomicMeasureSpace(tuple(weights), tuple(labels) if labels else None)
        return cls(space, CondExpectation(space, Partition(tuple(map(tuple, blocks)))),
                   CompositionOperator(tuple(tau)), name)

    @property
    def n(self) -> int:
        return self.space.atom_count

    @property
    def partition(self) -> Partition:
        return self.T.partition

    @cached_property
    def validation(self) -> ValidationReport:
        return validate_ceps(self.space, self.T, self.S)

    def is_valid(self) -> bool:
        return self.validation.valid

    def require_valid(self):
        if not self.validation.valid:
            raise InvalidSystem(f"not a conditional expectation preserving system: "
                                f"{self.validation.explanation}")

    @property
    def period(self) -> int:
        self.require_valid()
        return self.S.period

    def describe(self) -> str:
        blocks = "|".join(",".join(self.space.label(i) for i in b) for b in self.partition.blocks)
        return f"{self.name or 'system'}(n={self.n}, blocks={blocks}, tau={list(self.S.tau)})"
