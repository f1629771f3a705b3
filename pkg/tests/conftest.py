import random
from fractions import Fraction
from pathlib import Path

import pytest
from hypothesis import strategies as hst

from pffb.model import BatchAssignment, Instance, Schedule
from pffb.qtime import QTime

ROOT = Path(__file__).resolve().parent.parent
INSTANCES = ROOT / "instances"


def two_stage_demo() -> Instance:
    return Instance.build((1, 2), (3, 2), (3, 4), (0, 0, 1, 3, 3))


def nontight_demo() -> Instance:
    return Instance.build((1, 1, 1), (1, 2, 1), (1, 2, 1), (0, 0))


def sung_demo() -> Instance:
    return Instance.build((1, 1, 1), (1, 2, 3), (1, 3, 5), (0,) * 6)


def two_stage_optimal_schedule() -> Schedule:
    inst = two_stage_demo()
    B = BatchAssignment
    return Schedule(inst, (
        B(0, 0, QTime(0), (0, 1)), B(0, 0, QTime(3), (2, 3, 4)),
        B(1, 0, QTime(3), (0, 1)), B(1, 1, QTime(6), (2, 3)), B(1, 0, QTime(7), (4,)),
    ))


def two_stage_full_batch_schedule() -> Schedule:
    inst = two_stage_demo()
    B = BatchAssignment
    return Schedule(inst, (
        B(0, 0, QTime(1), (0, 1, 2)), B(0, 0, QTime(4), (3, 4)),
        B(1, 0, QTime(4), (0, 1)), B(1, 1, QTime(7), (2, 3)), B(1, 0, QTime(8), (4,)),
    ))


def random_releases(rng: random.Random, n: int, horizon: int = 6, denom: int = 4):
    return sorted(Fraction(rng.randint(0, horizon * denom), denom) for _ in range(n))


def random_instance(rng: random.Random, s_max=3, n_max=8, m_max=2, b_max=3,
                    p_max=4, s=None, n=None, zero_release=False, single_machine=False):
    s = s if s is not None else rng.randint(1, s_max)
    n = n if n is not None else rng.randint(1, n_max)
    machines = [1 if single_machine else rng.randint(1, m_max) for _ in range(s)]
    caps = [rng.randint(1, b_max) for _ in range(s)]
    ptimes = [Fraction(rng.randint(1, p_max * 2), rng.choice((1, 2))) for _ in range(s)]
    releases = [Fraction(0)] * n if zero_release else random_releases(rng, n)
    return Instance.build(machines, caps, ptimes, releases)


@hst.composite
def instances(draw, s_max=3, n_max=6, m_max=2, b_max=3, min_n=0):
    s = draw(hst.integers(1, s_max))
    n = draw(hst.integers(min_n, n_max))
    machines = draw(hst.lists(hst.integers(1, m_max), min_size=s, max_size=s))
    caps = draw(hst.lists(hst.integers(1, b_max), min_size=s, max_size=s))
    ptimes = draw(hst.lists(hst.fractions(Fraction(1, 2), 5, max_denominator=3),
                            min_size=s, max_size=s))
    releases = draw(hst.lists(hst.fractions(0, 8, max_denominator=4), min_size=n, max_size=n))
    return Instance.build(machines, caps, ptimes, sorted(releases))


@pytest.fixture
def demo():
    return two_stage_demo()


@pytest.fixture
def nontight():
    return nontight_demo()


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
