"""Deterministic discrete-event simulation of online scheduling.

A strategy only ever sees a :class:`SimState`, which exposes jobs that have
already been released and nothing about the future.  Decisions happen at
event times (releases, batch completions, requested wake-ups) and nowhere
else.  At one instant all events are applied first, in the order release,
completion, wake-up, and then the strategy decides once.

Jobs get their index when their release is processed, so indices follow
release order.  The engine accepts only decisions that keep each stage's
started jobs a prefix ``0..k-1``: every simulated schedule is an ERD
permutation schedule.
"""

from __future__ import annotations

import enum
import heapq
import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Protocol, Sequence

from .errors import CausalityError, DeadlockError, IllegalDecisionError, UnsupportedInstanceError
from .model import BatchAssignment, Instance, Schedule, StageConfig, require_valid
from .qtime import QTime


class EventKind(enum.IntEnum):
    RELEASE = 0
    COMPLETION = 1
    WAKEUP = 2


@dataclass(frozen=True)
class Event:
    time: QTime
    kind: EventKind
    stage: int = -1
    machine: int = -1
    job: int = -1

    def to_json(self) -> dict:
        out = {"time": self.time.to_json(), "kind": self.kind.name.lower()}
        if self.kind is EventKind.RELEASE:
            out["job"] = self.job
        elif self.kind is EventKind.COMPLETION:
            out["stage"], out["machine"] = self.stage, self.machine
        return out


@dataclass(frozen=True)
class Decision:
    """Batches to start now as ``(stage, machine, jobs)`` plus future alarms."""

    starts: tuple[tuple[int, int, tuple[int, ...]], ...] = ()
    wakeups: tuple[QTime, ...] = ()

    def to_json(self) -> dict:
        return {
            "starts": [{"stage": i, "machine": k, "jobs": list(jobs)}
                       for i, k, jobs in self.starts],
            "wakeups": [w.to_json() for w in self.wakeups],
        }


@dataclass(frozen=True)
class TraceStep:
    time: QTime
    events: tuple[Event, ...]
    decision: Decision


@dataclass(frozen=True)
class SimulationTrace:
    steps: tuple[TraceStep, ...]
    schedule: Schedule

    @property
    def instance(self) -> Instance:
        return self.schedule.instance

    def to_json(self) -> dict:
        return {
            "instance": self.instance.to_json(),
            "steps": [{"time": st.time.to_json(),
                       "events": [e.to_json() for e in st.events],
                       **st.decision.to_json()} for st in self.steps],
            "schedule": self.schedule.to_json(),
        }


class SimState:
    """What a strategy may look at: the trace prefix up to ``time``."""

    def __init__(self, stages: Sequence[StageConfig]):
        self.stages = tuple(stages)
        self.time = QTime(0)
        self.releases: list[Fraction] = []
        self.end_of_stream = False
        s = len(self.stages)
        # ready[i][j]: when job j became available at stage i
        self._ready: list[list[Optional[QTime]]] = [[] for _ in range(s)]
        self._started = [0] * s
        self._busy: list[list[Optional[QTime]]] = [[None] * st.machines for st in self.stages]
        self._finished = 0

    @property
    def n_released(self) -> int:
        return len(self.releases)

    def started(self, i: int) -> int:
        """Number of jobs that have started stage ``i`` (always a prefix)."""
        return self._started[i]

    def unstarted(self, i: int) -> int:
        return self.n_released - self._started[i]

    def available(self, i: int) -> list[int]:
        """Jobs waiting at stage ``i`` right now, lowest index first."""
        ready = self._ready[i]
        out = []
        j = self._started[i]
        while j < len(ready) and ready[j] is not None and ready[j] <= self.time:
            out.append(j)
            j += 1
        return out

    def idle_machines(self, i: int) -> list[int]:
        return [k for k, busy in enumerate(self._busy[i]) if busy is None]

    def is_busy(self, i: int, k: int) -> bool:
        return self._busy[i][k] is not None


class Strategy(Protocol):
    name: str

    def decide(self, state: SimState) -> Decision: ...


class JobSource:
    """Where jobs come from.  Subclasses may react to observed decisions."""

    stages: tuple[StageConfig, ...]

    def initial_releases(self) -> list[Fraction]:
        return []

    def observe(self, time: QTime, decision: Decision, state: SimState) -> list[Fraction]:
        """Called after every decision; returns new release times (> ``time``)."""
        return []

    def exhausted(self, n_released: int) -> bool:
        raise NotImplementedError


class StaticSource(JobSource):
    """Replays a fixed instance; jobs stay hidden until their release."""

    def __init__(self, inst: Instance):
        require_valid(inst)
        self.instance = inst
        self.stages = inst.stages

    def initial_releases(self):
        return list(self.instance.releases)

    def exhausted(self, n_released):
        return n_released == self.instance.n


def simulate(source, strategy: Strategy, max_steps: int = 1_000_000) -> SimulationTrace:
    """Run ``strategy`` against a job source (or a plain :class:`Instance`)."""
    if isinstance(source, Instance):
        source = StaticSource(source)
    stages = source.stages
    state = SimState(stages)
    seq = itertools.count()
    heap: list = []
    pending_wakeups: set = set()
    batches: list[BatchAssignment] = []
    steps: list[TraceStep] = []

    def schedule_releases(times, now: Optional[QTime]):
        for t in times:
            t = QTime.coerce(t)
            if not t.is_rational:
                raise UnsupportedInstanceError("release dates must be rational")
            if now is not None and t <= now:
                raise CausalityError(f"release at {t} not after current time {now}")
            heapq.heappush(heap, (t, EventKind.RELEASE, -1, -1, next(seq), None))

    schedule_releases(source.initial_releases(), None)
    while heap:
        if len(steps) >= max_steps:
            raise DeadlockError(f"no termination after {max_steps} decision points")
        now = heap[0][0]
        events = []
        while heap and heap[0][0] == now:
            _, kind, stage, machine, _, payload = heapq.heappop(heap)
            if kind is EventKind.RELEASE:
                j = state.n_released
                state.releases.append(now.to_fraction())
                state._ready[0].append(now)
                for i in range(1, len(stages)):
                    state._ready[i].append(None)
                events.append(Event(now, kind, job=j))
            elif kind is EventKind.COMPLETION:
                state._busy[stage][machine] = None
                for j in payload:
                    if stage + 1 < len(stages):
                        state._ready[stage + 1][j] = now
                    else:
                        state._finished += 1
                events.append(Event(now, kind, stage, machine))
            else:
                pending_wakeups.discard(now)
                events.append(Event(now, kind))
        state.time = now
        state.end_of_stream = source.exhausted(state.n_released)
        decision = strategy.decide(state)
        _apply(state, decision, now, heap, seq, pending_wakeups, batches)
        steps.append(TraceStep(now, tuple(events), decision))
        schedule_releases(source.observe(now, decision, state), now)
    if state._finished != state.n_released:
        raise DeadlockError(
            f"{state.n_released - state._finished} job(s) never finished; "
            "the strategy left jobs waiting without requesting a wake-up")
    inst = Instance(stages, tuple(state.releases))
    return SimulationTrace(tuple(steps), Schedule(inst, tuple(batches)))


def _apply(state: SimState, decision: Decision, now: QTime, heap, seq,
           pending_wakeups: set, batches: list) -> None:
    stages = state.stages
    used = set()
    by_stage: dict[int, list[int]] = {}
    avail = {}
    for i, k, jobs in decision.starts:
        if not 0 <= i < len(stages):
            raise IllegalDecisionError(f"unknown stage {i}")
        if not 0 <= k < stages[i].machines:
            raise IllegalDecisionError(f"stage {i}: unknown machine {k}")
        if state.is_busy(i, k) or (i, k) in used:
            raise IllegalDecisionError(f"stage {i} machine {k} is not idle at {now}")
        used.add((i, k))
        if not jobs or len(jobs) > stages[i].batch_capacity:
            raise IllegalDecisionError(f"stage {i}: batch size {len(jobs)} not allowed")
        if i not in avail:
            avail[i] = set(state.available(i))
        for j in jobs:
            if j not in avail[i]:
                raise IllegalDecisionError(f"job {j} is not available at stage {i} at {now}")
            avail[i].discard(j)
        by_stage.setdefault(i, []).extend(jobs)
    for i, jobs in by_stage.items():
        first = state._started[i]
        if sorted(jobs) != list(range(first, first + len(jobs))):
            raise IllegalDecisionError(
                f"stage {i}: jobs {sorted(jobs)} skip ahead of release order")
    for i, k, jobs in decision.starts:
        p = stages[i].processing_time
        end = now + p
        state._busy[i][k] = end
        state._started[i] += len(jobs)
        batches.append(BatchAssignment(i, k, now, tuple(jobs)))
        heapq.heappush(heap, (end, EventKind.COMPLETION, i, k, next(seq), tuple(jobs)))
    for w in decision.wakeups:
        w = QTime.coerce(w)
        if w <= now:
            raise IllegalDecisionError(f"wake-up at {w} is not in the future")
        if w not in pending_wakeups:
            pending_wakeups.add(w)
            heapq.heappush(heap, (w, EventKind.WAKEUP, -1, -1, next(seq), None))


def run_adversary_game(adversary: JobSource, strategy: Strategy, max_steps: int = 1_000_000):
    """Play an interactive adversary; returns ``(trace, realized instance)``."""
    trace = simulate(adversary, strategy, max_steps=max_steps)
    return trace, trace.instance
