"""Check orchestration, random campaigns and machine-readable output.

Reports are plain dicts of JSON-compatible values.  Every rational is a
``"p/q"`` string so reports are exact and diffable; no timestamps or timings
are included unless asked for, which keeps identical runs byte-identical.
"""

from __future__ import annotations

import json
import random
import time
from collections import Counter
from fractions import Fraction
from typing import Any, Callable

from . import __version__
from .config import CheckSpec, SystemConfig, config_from_system
from .ergodic import (
    NotConverged,
    cesaro_trace,
    classify_projections,
    ergodic_average_exact,
    ergodic_average_iterative,
    ergodic_limit,
    invariant_space_basis,
    is_ergodic_definition,
    is_ergodic_operator_equality,
    is_ergodic_tsm,
    product_criterion_on_indicators,
)
from .independence import sequence_independence, slln_check
from .lattice import BandProjection, CapExceeded, Element
from .mixing import DEFAULT_PAIR_CAP, is_weakly_mixing
from .operators import CEPSystem, apply_S, apply_T, structural_characterization, validate_ceps
from .systems import random_map_system, random_system

TOOL = "riesz-ergodic"
EXIT_OK, EXIT_VIOLATION, EXIT_INPUT = 0, 1, 2
CLASSIFY_CAP = 8
DEFAULT_CHECKS = ("birkhoff", "ergodic", "projections", "product", "mixing", "independence")


def rationals(f: Element) -> list[str]:
    return [str(c) for c in f.coords]


def atoms_of(sys: CEPSystem, P: BandProjection | None):
    if P is None:
        return None
    return [sys.space.label(i) for i in P.sorted_atoms()]


def _labels(sys: CEPSystem, atoms) -> list[str]:
    return [sys.space.label(i) for i in atoms]


def validation_section(sys: CEPSystem, exhaustive: bool = False) -> dict:
    r = validate_ceps(sys.space, sys.T, sys.S, exhaustive=exhaustive)
    return {
        "valid": r.valid,
        "method": r.method,
        "projections_checked": r.checks,
        "structural": r.structural,
        "explanation": r.explanation,
        "witness": atoms_of(sys, r.witness),
        "TS_witness": None if r.lhs is None else rationals(r.lhs),
        "T_witness": None if r.rhs is None else rationals(r.rhs),
    }


# Each check returns (section, violated).

def check_birkhoff(sys: CEPSystem, params: dict, seed: int):
    """``S L = L``, ``T L = T``, ``L² = L``, ``L e = e`` and positivity on the atom basis."""
    e = sys.space.unit()
    cols = sys.space.atom_indicators()
    limits = [ergodic_limit(sys, f) for f in cols]
    out = {
        "S_L_equals_L": all(apply_S(sys.S, g) == g for g in limits),
        "T_L_equals_T": all(apply_T(sys.T, g) == apply_T(sys.T, f) for f, g in zip(cols, limits)),
        "L_idempotent": all(ergodic_limit(sys, g) == g for g in limits),
        "L_unit": ergodic_limit(sys, e) == e,
        "L_positive": all(g.is_positive() for g in limits),
        "cycles": [_labels(sys, c) for c in sys.S.cycles],
    }
    return out, not all(v for k, v in out.items() if k != "cycles")


def check_ergodic(sys: CEPSystem, params: dict, seed: int):
    verdicts = [is_ergodic_definition(sys), is_ergodic_tsm(sys), is_ergodic_operator_equality(sys)]
    out: dict[str, Any] = {}
    for v in verdicts:
        out[v.method] = {
            "ergodic": v.ergodic,
            "witness": None if v.witness is None else rationals(v.witness),
        }
    out["operator-equality"]["structure"] = verdicts[2].detail
    agree = len({v.ergodic for v in verdicts}) == 1
    out["invariant_basis"] = [rationals(b) for b in invariant_space_basis(sys)]
    out["agree"] = agree
    out["ergodic"] = verdicts[0].ergodic
    return out, not agree


def check_projections(sys: CEPSystem, params: dict, seed: int):
    cap = int(params.get("cap", CLASSIFY_CAP))
    try:
        classes = classify_projections(sys, cap)
    except CapExceeded as exc:
        return {"skipped": str(exc)}, False

    def listing(s):
        return [atoms_of(sys, P) for P in sorted(s, key=lambda P: (len(P.mask), P.sorted_atoms()))]

    out = {
        "commuting_with_T": listing(classes.commuting),
        "S_invariant": listing(classes.invariant),
        "L_fixed": listing(classes.fixed),
        "inclusion_holds": classes.inclusion_holds,
        "equality_holds": classes.equality_holds,
        "strict_inclusion": classes.strict,
    }
    return out, not (classes.inclusion_holds and classes.equality_holds)


def check_product(sys: CEPSystem, params: dict, seed: int):
    holds, failing = product_criterion_on_indicators(sys)
    limit_eq = is_ergodic_operator_equality(sys).ergodic
    out = {
        "all_indicator_pairs_hold": holds,
        "first_failure": None if failing is None else _labels(sys, failing),
        "T_equals_L": limit_eq,
        "consistent": holds == limit_eq,
    }
    return out, holds != limit_eq


def check_mixing(sys: CEPSystem, params: dict, seed: int):
    cap = int(params.get("cap", DEFAULT_PAIR_CAP))
    report = is_weakly_mixing(sys, cap=cap, sampled=sys.n > cap, seed=seed,
                              samples=int(params.get("samples", 256)))
    ergodic = is_ergodic_operator_equality(sys).ergodic
    cx = report.counterexample
    out = {
        "weakly_mixing": report.weakly_mixing,
        "mode": report.mode,
        "period": report.period,
        "pairs_checked": report.pairs_checked,
        "all_terms_vanish_on_atoms": report.atom_basis_verdict,
        "counterexample": None if cx is None else {
            "P": atoms_of(sys, cx.P),
            "Q": atoms_of(sys, cx.Q),
            "period_average": rationals(cx.average),
        },
        "ergodic": ergodic,
        "implication_holds": ergodic or not report.weakly_mixing,
    }
    # Sampled verdicts can miss a failing pair, so only exhaustive mode is compared.
    forms_agree = report.mode != "exhaustive" or report.weakly_mixing == report.atom_basis_verdict
    out["forms_agree"] = forms_agree
    return out, not (out["implication_holds"] and forms_agree)


def check_independence(sys: CEPSystem, params: dict, seed: int):
    horizon = params.get("horizon")
    horizon = None if horizon is None else int(horizon)
    cap = int(params.get("subset_cap", 3))
    rows = []
    for i, f in enumerate(sys.space.atom_indicators()):
        v = sequence_independence(sys, f, horizon, cap)
        rows.append({
            "atom": sys.space.label(i),
            "independent": v.independent,
            "horizon": v.horizon,
            "subset_cap": v.subset_cap,
            "orbit_period": v.orbit_period,
            "witness": None if v.witness is None else {
                "lambda1": list(v.witness[0]),
                "lambda2": list(v.witness[1]),
                "P": atoms_of(sys, v.witness[2]),
                "Q": atoms_of(sys, v.witness[3]),
            },
        })
    s = slln_check(sys, horizon, cap)
    out = {
        "sequences": rows,
        "slln": {
            "hypothesis": s.hypothesis,
            "T_equals_L": s.limit_equals_T,
            "ergodic": s.ergodic,
            "consistent": s.consistent,
        },
    }
    return out, not s.consistent


def _element_param(config: SystemConfig | None, sys: CEPSystem, params: dict) -> Element:
    if "f" in params:
        if config is None:
            return sys.space.element(params["f"])
        return config.element(params["f"])
    return sys.space.atom_indicators()[0]


def trace_rows(sys: CEPSystem, f: Element, N: int) -> tuple[list[Element], Element]:
    return list(cesaro_trace(sys, f, N).values), ergodic_average_exact(sys, f).limit


def check_trace(sys: CEPSystem, params: dict, seed: int, config=None):
    f = _element_param(config, sys, params)
    N = int(params.get("steps", params.get("N", sys.period)))
    rows, limit = trace_rows(sys, f, N)
    out = {
        "f": rationals(f),
        "steps": N,
        "rows": [[n, rationals(v)] for n, v in enumerate(rows, start=1)],
        "limit": rationals(limit),
    }
    return out, False


def check_iterative(sys: CEPSystem, params: dict, seed: int, config=None):
    f = _element_param(config, sys, params)
    eps = Fraction(params.get("epsilon", "1/100"))
    exact = ergodic_limit(sys, f)
    out: dict[str, Any] = {"f": rationals(f), "epsilon": str(eps), "exact": rationals(exact)}
    try:
        approx, n_used = ergodic_average_iterative(sys, f, eps, int(params.get("n_max", 100_000)))
    except NotConverged as exc:
        out.update(converged=False, n_used=exc.n_used, approx=rationals(exc.approx))
        return out, True
    dist = (approx - exact).sup_norm()
    out.update(converged=True, n_used=n_used, approx=rationals(approx), distance=str(dist),
               within_tolerance=dist <= eps)
    return out, dist > eps


CHECKS: dict[str, Callable] = {
    "birkhoff": check_birkhoff,
    "ergodic": check_ergodic,
    "projections": check_projections,
    "product": check_product,
    "mixing": check_mixing,
    "independence": check_independence,
    "trace": check_trace,
    "iterative": check_iterative,
}


def run_checks(
    config: SystemConfig,
    checks=None,
    exhaustive: bool = False,
    seed: int = 0,
    timing: bool = False,
) -> tuple[dict, int]:
    """Validate the system, then run the requested checks.

    ``checks`` is a sequence of :class:`CheckSpec`; defaults to the config's
    own list, or every structural check when that is empty.  Returns the
    report and the exit code (0 all pass, 1 some property violated or the
    system is invalid).
    """
    sys = config.to_system()
    if checks is None:
        checks = config.checks or tuple(CheckSpec(c) for c in DEFAULT_CHECKS)
    report: dict[str, Any] = {
        "tool": TOOL,
        "version": __version__,
        "seed": seed,
        "system": config.to_dict(),
    }
    report["system"].pop("checks", None)
    report["validation"] = validation_section(sys, exhaustive)
    if not report["validation"]["valid"]:
        report["status"] = "invalid-system"
        return report, EXIT_VIOLATION

    results: dict[str, Any] = {}
    violated = []
    for spec in checks:
        if spec.name == "validate":
            continue
        fn = CHECKS[spec.name]
        t0 = time.perf_counter()
        if spec.name in ("trace", "iterative"):
            section, bad = fn(sys, spec.params, seed, config=config)
        else:
            section, bad = fn(sys, spec.params, seed)
        section["violated"] = bad
        if timing:
            section["seconds"] = round(time.perf_counter() - t0, 6)
        results[spec.name] = section
        if bad:
            violated.append(spec.name)
    report["checks"] = results
    report["violations"] = violated
    report["status"] = "violation" if violated else "pass"
    return report, EXIT_VIOLATION if violated else EXIT_OK


def trace_cesaro(config: SystemConfig, f, N: int) -> str:
    """CSV of ``S_n f`` for ``n = 1..N`` and a final ``limit`` row.

    Records are ``n;c1,c2,...`` with exact rationals.
    """
    sys = config.to_system()
    sys.require_valid()
    f = f if isinstance(f, Element) else config.element(f)
    rows, limit = trace_rows(sys, f, N)
    lines = ["n;" + ",".join(config.atoms)]
    lines += [f"{n};" + ",".join(rationals(v)) for n, v in enumerate(rows, start=1)]
    lines.append("limit;" + ",".join(rationals(limit)))
    return "\n".join(lines) + "\n"


def _system_suite(sys: CEPSystem, seed: int) -> tuple[dict[str, bool], dict[str, bool]]:
    """Cross-checker suite for one valid system: (violations by check, facts)."""
    verdicts = [is_ergodic_definition(sys).ergodic, is_ergodic_tsm(sys).ergodic,
                is_ergodic_operator_equality(sys).ergodic]
    ergodic = verdicts[2]
    birkhoff, b_bad = check_birkhoff(sys, {}, seed)
    classes = classify_projections(sys, CLASSIFY_CAP)
    product, p_bad = check_product(sys, {}, seed)
    mixing = is_weakly_mixing(sys).weakly_mixing
    slln = slln_check(sys)
    bad = {
        "birkhoff": b_bad,
        "ergodicity_agreement": len(set(verdicts)) != 1,
        "projection_classes": not (classes.inclusion_holds and classes.equality_holds),
        "product_criterion": p_bad,
        "mixing_implies_ergodic": mixing and not ergodic,
        "slln": not slln.consistent,
    }
    facts = {
        "ergodic": ergodic,
        "weakly_mixing": mixing,
        "strict_inclusion": classes.strict,
        "ergodic_not_mixing": ergodic and not mixing,
        "slln_hypothesis": slln.hypothesis,
    }
    return bad, facts


def random_campaign(
    seed: int,
    count: int,
    max_atoms: int = 8,
    adversarial: bool = False,
    timing: bool = False,
) -> tuple[dict, int]:
    """Generate ``count`` valid systems from ``seed`` and run the cross-checker suite.

    With ``adversarial=True`` an equal number of arbitrary maps is generated as
    well, and the atom-indicator validator is compared with both the
    exhaustive validator and the structural characterization.
    """
    t0 = time.perf_counter()
    rng = random.Random(seed)
    per_check: Counter = Counter()
    facts: Counter = Counter()
    by_atoms: Counter = Counter()
    violations = []
    for i in range(count):
        sys = random_system(rng, max_atoms)
        by_atoms[sys.n] += 1
        bad, fact = _system_suite(sys, seed)
        for k, v in bad.items():
            per_check[k] += v
            if v:
                violations.append({"index": i, "check": k,
                                   "system": config_from_system(sys).to_dict()})
        for k, v in fact.items():
            facts[k] += v

    adversarial_section = None
    if adversarial:
        arng = random.Random(seed + 1)
        stats = Counter()
        for i in range(count):
            sys = random_map_system(arng, max_atoms)
            atoms = validate_ceps(sys.space, sys.T, sys.S).valid
            full = validate_ceps(sys.space, sys.T, sys.S, exhaustive=True).valid
            structural, _ = structural_characterization(sys.space, sys.partition, sys.S)
            stats["valid" if atoms else "invalid"] += 1
            if not atoms == full == structural:
                per_check["validator_agreement"] += 1
                violations.append({"index": i, "check": "validator_agreement",
                                   "system": config_from_system(sys).to_dict()})
        adversarial_section = {"generated": count, "valid": stats["valid"],
                               "invalid": stats["invalid"]}

    report: dict[str, Any] = {
        "tool": TOOL,
        "version": __version__,
        "seed": seed,
        "count": count,
        "max_atoms": max_atoms,
        "generated": {
            "by_atoms": {str(k): by_atoms[k] for k in sorted(by_atoms)},
            **{k: facts[k] for k in ("ergodic", "weakly_mixing", "strict_inclusion",
                                     "ergodic_not_mixing", "slln_hypothesis")},
        },
        "checks": {k: per_check[k] for k in (
            "birkhoff", "ergodicity_agreement", "projection_classes",
            "product_criterion", "mixing_implies_ergodic", "slln",
        ) + (("validator_agreement",) if adversarial else ())},
        "violation_count": len(violations),
        "violations": violations,
    }
    if adversarial_section is not None:
        report["adversarial"] = adversarial_section
    if timing:
        report["seconds"] = round(time.perf_counter() - t0, 6)
    return report, EXIT_VIOLATION if violations else EXIT_OK


def to_json(report: dict) -> str:
    return json.dumps(report, indent=2) + "\n"


def to_table(report: dict) -> str:
    """Flatten a report into ``key.path: value`` lines."""
    lines: list[str] = []

    def walk(prefix, value):
        if isinstance(value, dict):
            for k, v in value.items():
                walk(f"{prefix}.{k}" if prefix else str(k), v)
        elif isinstance(value, list) and value and all(isinstance(v, (dict, list)) for v in value):
            for i, v in enumerate(value):
                walk(f"{prefix}[{i}]", v)
        else:
            if isinstance(value, list):
                value = "(" + ", ".join(map(str, value)) + ")"
            lines.append(f"{prefix}: {value}")

    walk("", report)
    return "\n".join(lines) + "\n"
