"""Cesàro means, the ergodic limit and the ergodicity checkers.

For a valid system ``τ`` permutes each block and is constant-weight on its
cycles, so the iterates of ``f`` are periodic and the ergodic limit is the
average of ``f`` over each cycle.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Iterator

from .lattice import (
    DEFAULT_ENUMERATION_CAP,
    BandProjection,
    Element,
    enumerate_band_projections,
    project,
)
from .operators import CEPSystem, apply_S, apply_T, range_T_membership


class NotConverged(RuntimeError):
    """The iterative average did not reach the tolerance within ``n_max`` steps."""

    def __init__(self, message: str, approx: Element, n_used: int, distance_bound: Fraction):
        super().__init__(message)
        self.approx = approx
        self.n_used = n_used
        self.distance_bound = distance_bound


@dataclass(frozen=True)
class CesaroTrace:
    values: tuple[Element, ...]  # S_1 f, ..., S_N f

    @property
    def horizon(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class ErgodicLimit:
    limit: Element
    cycles: tuple[tuple[int, ...], ...]


def iterates(sys: CEPSystem, f: Element) -> Iterator[Element]:
    """Yield ``f, Sf, S²f, ...`` forever."""
    while True:
        yield f
        f = apply_S(sys.S, f)


def cesaro_mean(sys: CEPSystem, f: Element, n: int) -> Element:
    """``S_n f = (1/n) Σ_{k<n} S^k f``, exactly."""
    if n < 1:
        raise ValueError("n must be at least 1")
    total = f
    g = f
    for _ in range(n - 1):
        g = apply_S(sys.S, g)
        total = total + g
    return total / n


def cesaro_trace(sys: CEPSystem, f: Element, N: int) -> CesaroTrace:
    """All of ``S_1 f .. S_N f`` in one pass."""
    values = []
    total = None
    for n, g in zip(range(1, N + 1), iterates(sys, f)):
        total = g if total is None else total + g
        values.append(total / n)
    return CesaroTrace(tuple(values))


def _cycle_average(sys: CEPSystem, f: Element) -> Element:
    w = sys.space.weights
    out = [Fraction(0)] * sys.n
    for cyc in sys.S.cycles:
        mass = sum((w[j] for j in cyc), Fraction(0))
        avg = sum((w[j] * f[j] for j in cyc), Fraction(0)) / mass
        for j in cyc:
            out[j] = avg
    return Element(out)


def ergodic_average_exact(sys: CEPSystem, f: Element) -> ErgodicLimit:
    """Closed form of ``L_S f``: the weighted average of ``f`` over each ``τ``-cycle."""
    sys.require_valid()
    limit = _cycle_average(sys, f)
    if apply_S(sys.S, limit) != limit or apply_T(sys.T, limit) != apply_T(sys.T, f):
        raise AssertionError("ergodic limit fails S L f = L f or T L f = T f")
    return ErgodicLimit(limit, sys.S.cycles)


def ergodic_limit(sys: CEPSystem, f: Element) -> Element:
    """Shorthand for ``ergodic_average_exact(sys, f).limit``."""
    sys.require_valid()
    return _cycle_average(sys, f)


def periodicity_bound(sys: CEPSystem, f: Element, n: int) -> Fraction:
    """A priori bound ``2 p ‖f‖∞ / n`` on ``‖S_n f − L_S f‖∞``."""
    return Fraction(2 * sys.period) * f.sup_norm() / n


def ergodic_average_iterative(
    sys: CEPSystem, f: Element, tolerance, n_max: int = 100_000
) -> tuple[Element, int]:
    """Run Cesàro means until the limit is certified within ``tolerance``.

    Stops at the first ``n`` where either ``S^n f = f`` (then ``S_n f`` is the
    limit exactly) or the periodicity bound drops to ``tolerance``.

    Raises:
        NotConverged: when ``n_max`` steps were not enough.
    """
    eps = Fraction(tolerance)
    if eps <= 0:
        raise ValueError("tolerance must be positive")
    sys.require_valid()
    total = f
    g = f
    n = 1
    while True:
        g = apply_S(sys.S, g)  # S^n f
        if g == f or periodicity_bound(sys, f, n) <= eps:
            return total / n, n
        if n >= n_max:
            raise NotConverged(
                f"no certificate for tolerance {eps} after {n} steps",
                total / n, n, periodicity_bound(sys, f, n),
            )
        total = total + g
        n += 1


def invariant_space_basis(sys: CEPSystem) -> list[Element]:
    """Indicators of the ``τ``-cycles; they span ``{f : Sf = f}``."""
    sys.require_valid()
    return [sys.space.indicator(c) for c in sys.S.cycles]


@dataclass(frozen=True)
class ErgodicityVerdict:
    ergodic: bool
    method: str
    witness: Element | None = None
    detail: str = ""

    def __bool__(self):
        return self.ergodic


def is_ergodic_definition(sys: CEPSystem) -> ErgodicityVerdict:
    """Ergodic iff ``L_S f ∈ R(T)`` for every invariant ``f``."""
    for b in invariant_space_basis(sys):
        if not range_T_membership(sys.T, ergodic_limit(sys, b)):
            return ErgodicityVerdict(False, "definition", b, "L_S f is not constant on the blocks of T")
    return ErgodicityVerdict(True, "definition")


def is_ergodic_tsm(sys: CEPSystem) -> ErgodicityVerdict:
    """Ergodic iff ``L_S f = Tf`` for every invariant ``f``."""
    for b in invariant_space_basis(sys):
        if ergodic_limit(sys, b) != apply_T(sys.T, b):
            return ErgodicityVerdict(False, "invariant-means", b, "L_S f differs from T f")
    return ErgodicityVerdict(True, "invariant-means")


def is_ergodic_operator_equality(sys: CEPSystem) -> ErgodicityVerdict:
    """Ergodic iff ``T = L_S``, compared column by column on atom indicators.

    The detail records the structural criterion: every block of ``T`` is a
    single ``τ``-cycle.
    """
    sys.require_valid()
    single = {frozenset(c) for c in sys.S.cycles} == {frozenset(b) for b in sys.partition.blocks}
    detail = "each block is one tau-cycle" if single else "some block splits into several tau-cycles"
    for f in sys.space.atom_indicators():
        if ergodic_limit(sys, f) != apply_T(sys.T, f):
            return ErgodicityVerdict(False, "operator-equality", f, detail)
    return ErgodicityVerdict(True, "operator-equality", None, detail)


def limit_equals_T(sys: CEPSystem) -> bool:
    return is_ergodic_operator_equality(sys).ergodic


@dataclass(frozen=True)
class ProjectionClasses:
    """Band projections commuting with ``T``, ``S``-invariant ones, and ``L_S``-fixed ones."""

    commuting: frozenset[BandProjection]
    invariant: frozenset[BandProjection]
    fixed: frozenset[BandProjection]

    @property
    def inclusion_holds(self) -> bool:
        return self.commuting <= self.invariant

    @property
    def equality_holds(self) -> bool:
        return self.invariant == self.fixed

    @property
    def strict(self) -> bool:
        return self.commuting < self.invariant


def classify_projections(sys: CEPSystem, cap: int = DEFAULT_ENUMERATION_CAP) -> ProjectionClasses:
    sys.require_valid()
    e = sys.space.unit()
    Te = apply_T(sys.T, e)
    commuting, invariant, fixed = set(), set(), set()
    for P in enumerate_band_projections(sys.space, cap):
        Pe = project(P, e)
        if apply_T(sys.T, Pe) == Pe and project(P, Te) == Pe:
            commuting.add(P)
        if apply_S(sys.S, Pe) == Pe:
            invariant.add(P)
        if ergodic_limit(sys, Pe) == Pe:
            fixed.add(P)
    return ProjectionClasses(frozenset(commuting), frozenset(invariant), frozenset(fixed))


@dataclass(frozen=True)
class ProductCriterion:
    limit: Element  # lim (1/n) Σ T(S^k f · g) = T(L_S f · g)
    rhs: Element  # Tf · Tg
    verdict: bool


def product_criterion(sys: CEPSystem, f: Element, g: Element) -> ProductCriterion:
    limit = apply_T(sys.T, ergodic_limit(sys, f) * g)
    rhs = apply_T(sys.T, f) * apply_T(sys.T, g)
    return ProductCriterion(limit, rhs, limit == rhs)


def product_criterion_truncated(sys: CEPSystem, f: Element, g: Element, n: int) -> Element:
    """``(1/n) Σ_{k<n} T(S^k f · g)`` by direct summation."""
    total = sys.space.zero()
    for _, h in zip(range(n), iterates(sys, f)):
        total = total + apply_T(sys.T, h * g)
    return total / n


def product_criterion_on_indicators(sys: CEPSystem) -> tuple[bool, tuple[int, int] | None]:
    """Product criterion over all pairs of atom indicators; returns the first failing pair."""
    ind = sys.space.atom_indicators()
    for i, f in enumerate(ind):
        for j, g in enumerate(ind):
            if not product_criterion(sys, f, g).verdict:
                return False, (i, j)
    return True, None


@dataclass(frozen=True)
class CesaroCheck:
    holds: bool
    n_checked: int
    first_violation: int | None
    last_mean: Element | None


def cesaro_utilities(
    seq: Iterable[Element],
    claimed_limit: Element,
    bound: Callable[[int], Fraction] | None = None,
) -> CesaroCheck:
    """Cesàro means of ``|f_k − claimed_limit|`` checked against ``bound(n)``.

    ``seq`` may be a generator; it is consumed once.  With ``bound=None`` the
    means are only required to be finite, so the result just reports the last
    mean.  The comparison is done on ``n · mean`` to avoid one division per step.
    """
    total = None
    n = 0
    for n, fk in enumerate(seq, start=1):
        d = abs(fk - claimed_limit)
        total = d if total is None else total + d
        if bound is not None:
            cap = n * Fraction(bound(n))
            if any(c > cap for c in total.coords):
                return CesaroCheck(False, n, n, total / n)
    return CesaroCheck(True, n, None, None if total is None else total / n)


def geometric_sequence(v: Element, r, count: int) -> Iterator[Element]:
    """``v, r v, r² v, ...`` (``count`` terms)."""
    r = Fraction(r)
    term = v
    for _ in range(count):
        yield term
        term = term * r


def geometric_cesaro_bound(v: Element, r) -> Callable[[int], Fraction]:
    """``n ↦ ‖v‖∞ / (n (1 − r))`` for ``0 < r < 1``."""
    r = Fraction(r)
    if not 0 < r < 1:
        raise ValueError("ratio must lie in (0, 1)")
    scale = v.sup_norm() / (1 - r)
    return lambda n: scale / n


def cesaro_means(seq: Iterable[Element]) -> Iterator[Element]:
    total = None
    for n, fk in enumerate(seq, start=1):
        total = fk if total is None else total + fk
        yield total / n

