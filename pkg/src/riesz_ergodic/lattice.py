"""Finite atomic Riesz spaces with exact rational coordinates.

A space with ``n`` atoms models every function on the atoms; the weak order
unit is the all-ones vector ``e``.  Because every element is dominated by a
multiple of ``e`` the e-bounded part of the space is the whole space, so the
f-algebra product is defined everywhere and acts componentwise.

Atoms are indexed from 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Iterator, Sequence

DEFAULT_ENUMERATION_CAP = 16


class DimensionMismatch(ValueError):
    """Two elements (or an element and a space) have different atom counts."""


class CapExceeded(ValueError):
    """Exhaustive quantification was requested beyond the configured cap."""


def as_fraction(value) -> Fraction:
    """Convert ints, Fractions and ``"p/q"`` strings to a Fraction.

    Floats are rejected: they would silently bring rounding into exact code.
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"malformed rational {value!r}") from exc
    raise TypeError(f"cannot use {type(value).__name__} as an exact rational")


@dataclass(frozen=True)
class AtomicMeasureSpace:
    """``n`` atoms carrying strictly positive rational weights summing to 1."""

    weights: tuple[Fraction, ...]
    labels: tuple[str, ...] | None = None

    def __post_init__(self):
        weights = tuple(as_fraction(w) for w in self.weights)
        object.__setattr__(self, "weights", weights)
        if not weights:
            raise ValueError("a space needs at least one atom")
        if any(w <= 0 for w in weights):
            raise ValueError("weight must be positive")
        if sum(weights) != 1:
            raise ValueError(f"weights must sum to 1, got {sum(weights)}")
        if self.labels is not None:
            labels = tuple(self.labels)
            if len(labels) != len(weights):
                raise ValueError("one label per atom is required")
            if len(set(labels)) != len(labels):
                raise ValueError("atom labels must be distinct")
            object.__setattr__(self, "labels", labels)

    @classmethod
    def uniform(cls, n: int, labels: Sequence[str] | None = None) -> "AtomicMeasureSpace":
        if n < 1:
            raise ValueError("a space needs at least one atom")
        return cls(tuple(Fraction(1, n) for _ in range(n)), labels)

    @property
    def atom_count(self) -> int:
        return len(self.weights)

    def __len__(self):
        return len(self.weights)

    def label(self, i: int) -> str:
        return self.labels[i] if self.labels is not None else str(i)

    def unit(self) -> "Element":
        """The weak order unit ``e``."""
        return Element.constant(self.atom_count, 1)

    def zero(self) -> "Element":
        return Element.constant(self.atom_count, 0)

    def indicator(self, atoms: Iterable[int]) -> "Element":
        members = set(atoms)
        self._check_atoms(members)
        return Element(tuple(Fraction(int(i in members)) for i in range(self.atom_count)))

    def atom_indicators(self) -> list["Element"]:
        return [self.indicator([i]) for i in range(self.atom_count)]

    def element(self, coords: Iterable) -> "Element":
        f = Element(coords)
        _check_size(f, self.atom_count)
        return f

    def measure(self, atoms: Iterable[int]) -> Fraction:
        return sum((self.weights[i] for i in atoms), Fraction(0))

    def _check_atoms(self, atoms):
        bad = [i for i in atoms if not 0 <= i < self.atom_count]
        if bad:
            raise IndexError(f"atoms {bad} outside 0..{self.atom_count - 1}")


@dataclass(frozen=True)
class Element:
    """A vector of exact rationals: the value of ``f`` at each atom.

    Arithmetic operators are componentwise; ``f * g`` between two elements is
    the f-algebra product and ``c * f`` scales.  ``|`` and ``&`` are the
    lattice supremum and infimum, ``<=`` is the (partial) lattice order.
    """

    coords: tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(as_fraction(c) for c in self.coords))

    @classmethod
    def constant(cls, n: int, value) -> "Element":
        return cls((as_fraction(value),) * n)

    def __len__(self):
        return len(self.coords)

    def __iter__(self) -> Iterator[Fraction]:
        return iter(self.coords)

    def __getitem__(self, i: int) -> Fraction:
        return self.coords[i]

    def _zip(self, other: "Element"):
        if not isinstance(other, Element):
            raise TypeError(f"expected Element, got {type(other).__name__}")
        if len(other.coords) != len(self.coords):
            raise DimensionMismatch(
                f"elements have {len(self.coords)} and {len(other.coords)} atoms"
            )
        return zip(self.coords, other.coords)

    def _new(self, coords) -> "Element":
        # Skips re-validation; coords are already Fractions.
        out = object.__new__(Element)
        object.__setattr__(out, "coords", tuple(coords))
        return out

    def __add__(self, other):
        return self._new(a + b for a, b in self._zip(other))

    def __sub__(self, other):
        return self._new(a - b for a, b in self._zip(other))

    def __neg__(self):
        return self._new(-a for a in self.coords)

    def __mul__(self, other):
        if isinstance(other, Element):
            return self._new(a * b for a, b in self._zip(other))
        c = as_fraction(other)
        return self._new(c * a for a in self.coords)

    __rmul__ = __mul__

    def __truediv__(self, other):
        c = as_fraction(other)
        return self._new(a / c for a in self.coords)

    def __or__(self, other):
        return self._new(max(a, b) for a, b in self._zip(other))

    def __and__(self, other):
        return self._new(min(a, b) for a, b in self._zip(other))

    def __abs__(self):
        return self._new(abs(a) for a in self.coords)

    def __le__(self, other):
        return all(a <= b for a, b in self._zip(other))

    def __ge__(self, other):
        return all(a >= b for a, b in self._zip(other))

    def is_zero(self) -> bool:
        return all(a == 0 for a in self.coords)

    def is_positive(self) -> bool:
        """``f >= 0`` in the lattice order."""
        return all(a >= 0 for a in self.coords)

    def sup_norm(self) -> Fraction:
        return max((abs(a) for a in self.coords), default=Fraction(0))

    def support(self) -> frozenset[int]:
        return frozenset(i for i, a in enumerate(self.coords) if a != 0)

    def to_strings(self) -> list[str]:
        return [str(a) for a in self.coords]

    def __str__(self):
        return "(" + ", ".join(self.to_strings()) + ")"


@dataclass(frozen=True)
class BandProjection:
    """Band projection onto the functions supported on ``mask``."""

    mask: frozenset[int]

    def __post_init__(self):
        object.__setattr__(self, "mask", frozenset(self.mask))

    def __call__(self, f: Element) -> Element:
        return project(self, f)

    def compose(self, other: "BandProjection") -> "BandProjection":
        return BandProjection(self.mask & other.mask)

    def complement(self, n: int) -> "BandProjection":
        return BandProjection(frozenset(range(n)) - self.mask)

    def sorted_atoms(self) -> list[int]:
        return sorted(self.mask)

    def __str__(self):
        return "{" + ",".join(str(i) for i in self.sorted_atoms()) + "}"


def _check_size(f: Element, n: int):
    if len(f) != n:
        raise DimensionMismatch(f"element has {len(f)} atoms, space has {n}")


def lattice_ops(f: Element, g: Element) -> tuple[Element, Element]:
    """Return ``(f ∨ g, f ∧ g)``."""
    return f | g, f & g


def abs_parts(f: Element) -> tuple[Element, Element, Element]:
    """Return ``(|f|, f⁺, f⁻)`` with ``f = f⁺ − f⁻`` and ``|f| = f⁺ + f⁻``."""
    zero = Element.constant(len(f), 0)
    return abs(f), f | zero, (-f) | zero


def multiply(f: Element, g: Element) -> Element:
    """The f-algebra product. With ``e`` the all-ones vector it is componentwise."""
    return f * g


def project(P: BandProjection, f: Element) -> Element:
    mask = P.mask
    zero = Fraction(0)
    return f._new(a if i in mask else zero for i, a in enumerate(f.coords))


def enumerate_band_projections(
    space: AtomicMeasureSpace | int, cap: int = DEFAULT_ENUMERATION_CAP
) -> list[BandProjection]:
    """All ``2**n`` band projections, ordered by size then lexicographically.

    Raises:
        CapExceeded: if ``n > cap``; callers should fall back to sampling.
    """
    n = space if isinstance(space, int) else space.atom_count
    if n > cap:
        raise CapExceeded(f"cap exceeded: 2^{n} band projections (cap n <= {cap})")
    return [
        BandProjection(frozenset(c))
        for size in range(n + 1)
        for c in combinations(range(n), size)
    ]
