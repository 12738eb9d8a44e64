import random
from fractions import Fraction

import pytest
from hypothesis import settings, strategies as st

from riesz_ergodic.lattice import Element
from riesz_ergodic.systems import random_system

settings.register_profile("default", deadline=None)
settings.load_profile("default")

rationals = st.fractions(min_value=-20, max_value=20, max_denominator=12)


def elements(n):
    return st.lists(rationals, min_size=n, max_size=n).map(lambda c: Element(tuple(c)))


@st.composite
def element_pairs(draw, max_n=8):
    n = draw(st.integers(1, max_n))
    return draw(elements(n)), draw(elements(n))


@st.composite
def systems(draw, max_atoms=8):
    seed = draw(st.integers(0, 2**32 - 1))
    return random_system(random.Random(seed), max_atoms)


@st.composite
def system_and_element(draw, max_atoms=8):
    sys = draw(systems(max_atoms))
    return sys, draw(elements(sys.n))


def frac_list(*values):
    return Element(tuple(Fraction(v) for v in values))


@pytest.fixture
def F():
    return frac_list


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
