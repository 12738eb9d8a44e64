"""Named example systems, exhaustive enumeration and seeded random generation."""

from __future__ import annotations

import random
from fractions import Fraction
from itertools import permutations, product
from typing import Iterator

from .lattice import Element
from .operators import CEPSystem, Partition


def rotation(n: int) -> CEPSystem:
    """Uniform weights, full expectation, ``τ(i) = i + 1 mod n``."""
    return CEPSystem.build([Fraction(1, n)] * n, [range(n)],
                           [(i + 1) % n for i in range(n)], name=f"rotation-{n}")


def identity(n: int) -> CEPSystem:
    """Uniform weights, full expectation, ``τ = id``."""
    return CEPSystem.build([Fraction(1, n)] * n, [range(n)], range(n), name=f"identity-{n}")


def blockwise_swap_4() -> CEPSystem:
    """Blocks {0,1} and {2,3}, each swapped by ``τ``."""
    return CEPSystem.build([Fraction(1, 4)] * 4, [(0, 1), (2, 3)], [1, 0, 3, 2],
                           name="blockwise-swap-4")


def fixed_swap_3() -> CEPSystem:
    """Full expectation on three atoms; atom 0 fixed, atoms 1 and 2 swapped."""
    return CEPSystem.build([Fraction(1, 3)] * 3, [(0, 1, 2)], [0, 2, 1], name="fixed-swap-3")


def discrete(n: int) -> CEPSystem:
    """``T`` the identity (singleton blocks), which forces ``τ = id``."""
    return CEPSystem.build([Fraction(1, n)] * n, [(i,) for i in range(n)], range(n),
                           name=f"discrete-{n}")


NAMED = {
    "rotation-2": lambda: rotation(2),
    "rotation-3": lambda: rotation(3),
    "identity-2": lambda: identity(2),
    "blockwise-swap-4": blockwise_swap_4,
    "fixed-swap-3": fixed_swap_3,
    "discrete-3": lambda: discrete(3),
}


def set_partitions(n: int) -> Iterator[Partition]:
    """All set partitions of ``0..n-1`` (restricted growth strings order)."""

    def rgs(prefix, top):
        if len(prefix) == n:
            yield prefix
            return
        for k in range(top + 2):
            yield from rgs(prefix + [k], max(top, k))

    if n == 0:
        return
    for labels in rgs([0], 0):
        yield Partition.from_labels(labels)


def nonuniform_profile(n: int) -> tuple[Fraction, ...]:
    """Fixed non-uniform weights with repeated values, so some permutations survive."""
    raw = [1 + i // 2 for i in range(n)]  # 1,1,2,2,3,...
    if n == 2:
        raw = [1, 2]
    total = sum(raw)
    return tuple(Fraction(r, total) for r in raw)


def blockwise_permutations(partition: Partition) -> Iterator[tuple[int, ...]]:
    n = partition.atom_count
    for choice in product(*(permutations(b) for b in partition.blocks)):
        tau = [0] * n
        for block, image in zip(partition.blocks, choice):
            for a, b in zip(block, image):
                tau[a] = b
        yield tuple(tau)


def enumerate_systems(max_n: int, profiles=("uniform", "nonuniform")) -> Iterator[CEPSystem]:
    """Every valid system with ``n <= max_n`` for the given weight profiles.

    Valid systems are exactly the blockwise permutations that preserve weights.
    """
    for n in range(1, max_n + 1):
        weight_sets = []
        if "uniform" in profiles:
            weight_sets.append(("u", tuple(Fraction(1, n) for _ in range(n))))
        if "nonuniform" in profiles and n > 1:
            weight_sets.append(("w", nonuniform_profile(n)))
        for tag, weights in weight_sets:
            for part in set_partitions(n):
                for tau in blockwise_permutations(part):
                    if all(weights[i] == weights[t] for i, t in enumerate(tau)):
                        yield CEPSystem.build(weights, part.blocks, tau,
                                              name=f"enum-{tag}{n}")


def random_partition(rng: random.Random, n: int) -> Partition:
    labels = []
    top = -1
    for _ in range(n):
        k = rng.randint(0, top + 1)
        top = max(top, k)
        labels.append(k)
    return Partition.from_labels(labels)


def random_system(rng: random.Random, max_atoms: int = 8, min_atoms: int = 1) -> CEPSystem:
    """A valid system: random partition, random permutation of each block,
    random rational weights constant on each cycle."""
    n = rng.randint(min_atoms, max_atoms)
    part = random_partition(rng, n)
    tau = [0] * n
    for block in part.blocks:
        image = list(block)
        rng.shuffle(image)
        for a, b in zip(block, image):
            tau[a] = b
    raw = [0] * n
    seen = set()
    for start in range(n):
        if start in seen:
            continue
        c = rng.randint(1, 9)
        j = start
        while j not in seen:
            seen.add(j)
            raw[j] = c
            j = tau[j]
    total = sum(raw)
    return CEPSystem.build([Fraction(r, total) for r in raw], part.blocks, tau,
                           name=f"random-{n}")


def random_map_system(rng: random.Random, max_atoms: int = 8) -> CEPSystem:
    """Adversarial: an arbitrary map ``τ`` and random weights, usually invalid."""
    n = rng.randint(1, max_atoms)
    part = random_partition(rng, n)
    raw = [rng.randint(1, 3) for _ in range(n)]
    total = sum(raw)
    tau = [rng.randrange(n) for _ in range(n)]
    return CEPSystem.build([Fraction(r, total) for r in raw], part.blocks, tau,
                           name=f"random-map-{n}")


def random_element(rng: random.Random, n: int, span: int = 9) -> Element:
    return Element(tuple(Fraction(rng.randint(-span, span), rng.randint(1, span)) for _ in range(n)))


def random_systems(seed: int, count: int, max_atoms: int = 8) -> list[CEPSystem]:
    rng = random.Random(seed)
    return [random_system(rng, max_atoms) for _ in range(count)]
