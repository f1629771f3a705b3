"""Online scheduling rules: Never-Wait, Full-Batch and t-Switch."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .engine import Decision, SimState
from .errors import UnsupportedInstanceError
from .model import StageConfig
from .qtime import PHI, QTime


def _greedy_stage(state: SimState, i: int, starts: list) -> None:
    """Fill idle machines of stage ``i`` with maximal batches, lowest index first."""
    b = state.stages[i].batch_capacity
    waiting = state.available(i)
    for k in state.idle_machines(i):
        if not waiting:
            break
        starts.append((i, k, tuple(waiting[:b])))
        waiting = waiting[b:]


class NeverWait:
    """Start a batch whenever a machine is idle and some job is waiting."""

    name = "never-wait"

    def decide(self, state: SimState) -> Decision:
        starts: list = []
        for i in range(len(state.stages)):
            _greedy_stage(state, i, starts)
        return Decision(tuple(starts))


class FullBatch:
    """Start only full batches; a short batch only for the final jobs.

    Needs the end-of-stream signal: until it arrives the number of jobs still
    to come is unknown, so short batches are never started.
    """

    name = "full-batch"

    def decide(self, state: SimState) -> Decision:
        starts = []
        for i, st in enumerate(state.stages):
            b = st.batch_capacity
            waiting = state.available(i)
            remaining = state.unstarted(i)
            for k in state.idle_machines(i):
                if len(waiting) >= b:
                    batch = waiting[:b]
                elif state.end_of_stream and waiting and len(waiting) == remaining < b:
                    batch = waiting
                else:
                    break
                starts.append((i, k, tuple(batch)))
                waiting = waiting[len(batch):]
                remaining -= len(batch)
        return Decision(tuple(starts))


@dataclass(frozen=True)
class StartingInstantGrid:
    """Instants ``t + l*p1`` (``l`` integer) that are nonnegative."""

    t: QTime
    first: QTime
    period: Fraction

    @classmethod
    def for_stages(cls, stages: Sequence[StageConfig]) -> "StartingInstantGrid":
        p1, p2 = stages[0].processing_time, stages[1].processing_time
        t = PHI * p1 + (PHI - 1) * p2
        first = t - math.floor(t / p1) * p1
        return cls(t, first, p1)

    def index(self, x: QTime) -> QTime:
        return (QTime.coerce(x) - self.first) / self.period

    def contains(self, x) -> bool:
        pos = self.index(x)
        return pos.sign() >= 0 and pos.is_rational and pos.a.denominator == 1

    def next_after(self, x) -> QTime:
        """Smallest grid instant strictly greater than ``x``."""
        pos = self.index(x)
        if pos.sign() < 0:
            return self.first
        return self.first + (math.floor(pos) + 1) * self.period

    def next_at_or_after(self, x) -> QTime:
        pos = self.index(x)
        if pos.sign() <= 0:
            return self.first
        return self.first + math.ceil(pos) * self.period

    def instants(self, count: int) -> list[QTime]:
        return [self.first + k * self.period for k in range(count)]


class TSwitch:
    """Two-stage rule: stage 0 starts only on the grid, stage 1 idles until ``t``.

    At each grid instant stage 0 starts up to ``m1*b1`` waiting jobs, filling
    machines one after another with full batches.  From ``t`` on stage 1 runs
    Never-Wait.
    """

    name = "t-switch"

    def __init__(self, stages: Sequence[StageConfig]):
        if len(stages) != 2:
            raise UnsupportedInstanceError("t-switch needs exactly two stages")
        self.grid = StartingInstantGrid.for_stages(stages)

    @property
    def t(self) -> QTime:
        return self.grid.t

    def decide(self, state: SimState) -> Decision:
        now = state.time
        starts: list = []
        wakeups = []
        launched = 0
        if self.grid.contains(now):
            before = len(starts)
            _greedy_stage(state, 0, starts)
            launched = sum(len(jobs) for _, _, jobs in starts[before:])
        if state.unstarted(0) > launched:
            wakeups.append(self.grid.next_after(now))
        if now >= self.t:
            _greedy_stage(state, 1, starts)
        elif state.n_released:
            wakeups.append(self.t)
        return Decision(tuple(starts), tuple(wakeups))


class DelayedStart:
    """Start nothing before ``until``, then defer to ``inner``.

    Models an online rule that hesitates; handy against the adversaries.
    """

    def __init__(self, until, inner=None):
        self.until = QTime.coerce(until)
        self.inner = inner or NeverWait()
        self.name = f"delayed({self.until})"

    def decide(self, state: SimState) -> Decision:
        if state.time < self.until:
            return Decision((), (self.until,))
        return self.inner.decide(state)


STRATEGY_NAMES = ("never-wait", "full-batch", "t-switch")


def make_strategy(name: str, stages: Sequence[StageConfig]):
    if name == "never-wait":
        return NeverWait()
    if name == "full-batch":
        return FullBatch()
    if name == "t-switch":
        return TSwitch(stages)
    raise ValueError(f"unknown strategy {name!r}; choose from {', '.join(STRATEGY_NAMES)}")
