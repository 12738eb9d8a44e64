"""System-definition files.

A config is a JSON object::

    {
      "name": "rotation-3",
      "atoms": ["a", "b", "c"],
      "weights": ["1/3", "1/3", "1/3"],
      "partition": [["a", "b", "c"]],
      "tau": {"a": "b", "b": "c", "c": "a"},
      "checks": [{"name": "ergodic"}, {"name": "trace", "f": ["3", "0", "0"], "steps": 3}]
    }

``tau`` maps each atom to its image, so ``(Sf)(a) = f(tau[a])``.  Weights are
exact rational strings and must be positive and sum to 1.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

from .lattice import Element, as_fraction
from .operators import CEPSystem

KNOWN_CHECKS = (
    "validate",
    "birkhoff",
    "ergodic",
    "projections",
    "product",
    "mixing",
    "independence",
    "trace",
    "iterative",
)


class ConfigError(ValueError):
    """Malformed system definition; ``field`` names the offending entry."""

    def __init__(self, field: str, message: str, line: int | None = None):
        where = field if line is None else f"{field} (line {line})"
        super().__init__(f"{where}: {message}")
        self.field = field
        self.line = line


@dataclass(frozen=True)
class CheckSpec:
    name: str
    params: dict = field(default_factory=dict)


@dataclass(frozen=True)
class SystemConfig:
    atoms: tuple[str, ...]
    weights: tuple[Fraction, ...]
    partition: tuple[tuple[str, ...], ...]
    tau: dict
    checks: tuple[CheckSpec, ...] = ()
    name: str = ""

    def index(self, label: str) -> int:
        return self.atoms.index(label)

    def to_system(self) -> CEPSystem:
        idx = {a: i for i, a in enumerate(self.atoms)}
        blocks = [[idx[a] for a in block] for block in self.partition]
        tau = [idx[self.tau[a]] for a in self.atoms]
        return CEPSystem.build(self.weights, blocks, tau, labels=self.atoms, name=self.name)

    def element(self, values) -> Element:
        """Parse an element given as a list of rationals or a ``{label: value}`` map."""
        if isinstance(values, dict):
            unknown = [k for k in values if k not in self.atoms]
            if unknown:
                raise ConfigError("f", f"unknown atom label {unknown[0]!r}")
            values = [values.get(a, 0) for a in self.atoms]
        if len(values) != len(self.atoms):
            raise ConfigError("f", f"expected {len(self.atoms)} coordinates, got {len(values)}")
        try:
            return Element(tuple(as_fraction(v) for v in values))
        except (TypeError, ValueError) as exc:
            raise ConfigError("f", str(exc)) from None

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {}
        if self.name:
            out["name"] = self.name
        out["atoms"] = list(self.atoms)
        out["weights"] = [str(w) for w in self.weights]
        out["partition"] = [list(b) for b in self.partition]
        out["tau"] = {a: self.tau[a] for a in self.atoms}
        if self.checks:
            out["checks"] = [{"name": c.name, **c.params} for c in self.checks]
        return out


def serialize_config(config: SystemConfig) -> str:
    return json.dumps(config.to_dict(), indent=2) + "\n"


def _require(doc: dict, key: str, kind):
    if key not in doc:
        raise ConfigError(key, "missing required field")
    value = doc[key]
    if not isinstance(value, kind):
        raise ConfigError(key, f"expected {kind.__name__}")
    return value


def _label(value, where: str) -> str:
    if not isinstance(value, str):
        raise ConfigError(where, "atom labels must be strings")
    return value


def parse_config(text: str) -> SystemConfig:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError("<document>", exc.msg, exc.lineno) from None
    if not isinstance(doc, dict):
        raise ConfigError("<document>", "config must be a JSON object")
    return config_from_dict(doc)


def config_from_dict(doc: dict) -> SystemConfig:
    atoms = tuple(_label(a, f"atoms[{i}]") for i, a in enumerate(_require(doc, "atoms", list)))
    if not atoms:
        raise ConfigError("atoms", "at least one atom is required")
    if len(set(atoms)) != len(atoms):
        raise ConfigError("atoms", "atom labels must be distinct")
    known = set(atoms)

    raw_weights = _require(doc, "weights", list)
    if len(raw_weights) != len(atoms):
        raise ConfigError("weights", f"expected {len(atoms)} weights, got {len(raw_weights)}")
    weights = []
    for i, w in enumerate(raw_weights):
        if not isinstance(w, (str, int)) or isinstance(w, bool):
            raise ConfigError(f"weights[{i}]", "weights must be rational strings like \"1/3\"")
        try:
            q = as_fraction(w)
        except (ValueError, TypeError):
            raise ConfigError(f"weights[{i}]", f"malformed rational {w!r}") from None
        if q <= 0:
            raise ConfigError(f"weights[{i}]", "weight must be positive")
        weights.append(q)
    if sum(weights) != 1:
        raise ConfigError("weights", f"weights must sum to 1, got {sum(weights)}")

    blocks = []
    covered: list[str] = []
    for i, block in enumerate(_require(doc, "partition", list)):
        if not isinstance(block, list) or not block:
            raise ConfigError(f"partition[{i}]", "blocks must be nonempty lists of labels")
        for j, a in enumerate(block):
            _label(a, f"partition[{i}][{j}]")
            if a not in known:
                raise ConfigError(f"partition[{i}][{j}]", f"unknown atom label {a!r}")
        blocks.append(tuple(block))
        covered.extend(block)
    if len(covered) != len(set(covered)):
        dup = next(a for a in covered if covered.count(a) > 1)
        raise ConfigError("partition", f"atom {dup!r} appears in more than one block")
    missing = [a for a in atoms if a not in set(covered)]
    if missing:
        raise ConfigError("partition", f"partition does not cover atoms {missing}")

    raw_tau = _require(doc, "tau", dict)
    for a, b in raw_tau.items():
        if a not in known:
            raise ConfigError(f"tau.{a}", f"unknown atom label {a!r}")
        _label(b, f"tau.{a}")
        if b not in known:
            raise ConfigError(f"tau.{a}", f"unknown atom label {b!r}")
    missing = [a for a in atoms if a not in raw_tau]
    if missing:
        raise ConfigError("tau", f"no image for atom {missing[0]!r}")

    checks = []
    for i, c in enumerate(doc.get("checks", [])):
        if isinstance(c, str):
            c = {"name": c}
        if not isinstance(c, dict) or "name" not in c:
            raise ConfigError(f"checks[{i}]", "each check needs a name")
        if c["name"] not in KNOWN_CHECKS:
            raise ConfigError(f"checks[{i}].name", f"unknown check {c['name']!r}")
        params = {k: v for k, v in c.items() if k != "name"}
        checks.append(CheckSpec(c["name"], params))

    name = doc.get("name", "")
    if not isinstance(name, str):
        raise ConfigError("name", "expected str")
    return SystemConfig(atoms, tuple(weights), tuple(blocks),
                        {a: raw_tau[a] for a in atoms}, tuple(checks), name)


def config_from_system(sys: CEPSystem, checks=()) -> SystemConfig:
    """Build a config (with generated labels when the space has none)."""
    labels = tuple(sys.space.label(i) for i in range(sys.n))
    return SystemConfig(
        labels,
        sys.space.weights,
        tuple(tuple(labels[i] for i in b) for b in sys.partition.blocks),
        {labels[i]: labels[t] for i, t in enumerate(sys.S.tau)},
        tuple(checks),
        sys.name,
    )
