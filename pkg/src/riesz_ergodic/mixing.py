"""Conditional weak mixing.

In a valid system ``τ`` is a bijection, so the deviation terms
``|T(S^k f · g) − Tf · Tg|`` are periodic in ``k`` with period dividing the
least common multiple of the cycle lengths.  Their Cesàro limit is therefore
the exact average over one period; no truncation enters a verdict.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Iterable

from .ergodic import is_ergodic_operator_equality
from .lattice import BandProjection, CapExceeded, Element, enumerate_band_projections, project
from .operators import CEPSystem, apply_T

DEFAULT_PAIR_CAP = 8


def _deviations(sys: CEPSystem, f: Element, g: Element, count: int) -> list[Element]:
    rhs = apply_T(sys.T, f) * apply_T(sys.T, g)
    out = []
    h = f
    for _ in range(count):
        out.append(abs(apply_T(sys.T, h * g) - rhs))
        h = sys.S(h)
    return out


def weak_mixing_term(sys: CEPSystem, P: BandProjection, Q: BandProjection, k: int) -> Element:
    """``|T(S^k Pe · Qe) − TPe · TQe|``."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    sys.require_valid()
    e = sys.space.unit()
    Pe, Qe = project(P, e), project(Q, e)
    Sk_Pe = sys.S.power(k)(Pe)
    return abs(apply_T(sys.T, Sk_Pe * Qe) - apply_T(sys.T, Pe) * apply_T(sys.T, Qe))


def weak_mixing_fg(sys: CEPSystem, f: Element, g: Element) -> Element:
    """Cesàro limit of ``|T(S^k f · g) − Tf · Tg|`` as a one-period average."""
    sys.require_valid()
    p = sys.period
    total = sys.space.zero()
    for d in _deviations(sys, f, g, p):
        total = total + d
    return total / p


@dataclass(frozen=True)
class PairRecord:
    P: BandProjection
    Q: BandProjection
    period: int
    average: Element


@dataclass(frozen=True)
class MixingReport:
    weakly_mixing: bool
    mode: str  # "exhaustive" or "sampled"
    period: int
    pairs_checked: int
    atom_basis_verdict: bool  # all terms vanish on atom-indicator pairs
    counterexample: PairRecord | None = None
    records: tuple[PairRecord, ...] = field(default=(), repr=False)

    def __bool__(self):
        return self.weakly_mixing


def _atom_basis_verdict(sys: CEPSystem, p: int) -> bool:
    # Terms are zero for all P, Q iff T(S^k f·g) = Tf·Tg on atom pairs, by bilinearity.
    ind = sys.space.atom_indicators()
    return all(
        d.is_zero() for f in ind for g in ind for d in _deviations(sys, f, g, p)
    )


def is_weakly_mixing(
    sys: CEPSystem,
    cap: int = DEFAULT_PAIR_CAP,
    sampled: bool = False,
    samples: int = 256,
    seed: int = 0,
    keep_records: bool = False,
) -> MixingReport:
    """Verdict over all pairs of band projections, or a seeded sample of them.

    Exhaustive when ``n <= cap``.  Above the cap, ``sampled=True`` draws
    ``samples`` random pairs and the report is labelled ``"sampled"``.
    Stops at the first pair whose period average is nonzero.

    Raises:
        CapExceeded: if ``n > cap`` and sampling was not requested.
    """
    sys.require_valid()
    p = sys.period
    n = sys.n
    if n <= cap:
        mode = "exhaustive"
        projections = enumerate_band_projections(sys.space, cap)
        pairs: Iterable = ((P, Q) for P in projections for Q in projections)
    elif sampled:
        mode = "sampled"
        rng = random.Random(seed)

        def draw():
            return BandProjection(frozenset(i for i in range(n) if rng.random() < 0.5))

        pairs = [(draw(), draw()) for _ in range(samples)]
    else:
        raise CapExceeded(f"cap exceeded: {n} atoms > pair cap {cap}; pass sampled=True")

    e = sys.space.unit()
    records = []
    checked = 0
    for P, Q in pairs:
        checked += 1
        total = sys.space.zero()
        for d in _deviations(sys, project(P, e), project(Q, e), p):
            total = total + d
        rec = PairRecord(P, Q, p, total / p)
        if keep_records:
            records.append(rec)
        if not rec.average.is_zero():
            return MixingReport(False, mode, p, checked, _atom_basis_verdict(sys, p), rec,
                                tuple(records))
    return MixingReport(True, mode, p, checked, _atom_basis_verdict(sys, p), None, tuple(records))


@dataclass
class MixingCampaign:
    checked: int = 0
    mixing: int = 0
    ergodic: int = 0
    violations: list[str] = field(default_factory=list)
    ergodic_not_mixing: list[str] = field(default_factory=list)


def mixing_implies_ergodic_campaign(systems: Iterable[CEPSystem], count: int | None = None,
                                    cap: int = DEFAULT_PAIR_CAP) -> MixingCampaign:
    """Check that no weakly mixing system fails to be ergodic.

    Systems that are ergodic but not weakly mixing are collected as witnesses
    that the implication is one-way.
    """
    out = MixingCampaign()
    for i, sys in enumerate(systems):
        if count is not None and i >= count:
            break
        mixing = is_weakly_mixing(sys, cap=cap).weakly_mixing
        ergodic = is_ergodic_operator_equality(sys).ergodic
        out.checked += 1
        out.mixing += mixing
        out.ergodic += ergodic
        if mixing and not ergodic:
            out.violations.append(sys.describe())
        if ergodic and not mixing:
            out.ergodic_not_mixing.append(sys.describe())
    return out


def mixing_structure_holds(sys: CEPSystem, report: MixingReport | None = None) -> bool:
    """Weakly mixing iff ``T`` is the identity; observed in this finite model."""
    if report is None:
        report = is_weakly_mixing(sys)
    return report.weakly_mixing == sys.T.is_identity()

