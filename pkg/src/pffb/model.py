"""Instances, schedules, feasibility checks and objective evaluation.

Indices are 0-based throughout the API and in JSON: stage ``i``, machine ``k``
and job ``j`` all count from zero.  Human-facing output (charts) switches to
1-based labels.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .errors import InfeasibleScheduleError, InvalidInstanceError, UndefinedObjectiveError
from .qtime import QTime, as_fraction, format_fraction


@dataclass(frozen=True)
class StageConfig:
    machines: int
    batch_capacity: int
    processing_time: Fraction

    def __post_init__(self):
        object.__setattr__(self, "processing_time", as_fraction(self.processing_time))

    @property
    def slots(self) -> int:
        """Jobs a stage can hold at once, ``machines * batch_capacity``."""
        return self.machines * self.batch_capacity

    def to_json(self) -> dict:
        return {
            "machines": self.machines,
            "batch_capacity": self.batch_capacity,
            "processing_time": format_fraction(self.processing_time),
        }


@dataclass(frozen=True)
class Instance:
    stages: tuple[StageConfig, ...]
    releases: tuple[Fraction, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "stages", tuple(self.stages))
        object.__setattr__(self, "releases", tuple(as_fraction(r) for r in self.releases))

    @classmethod
    def build(cls, machines: Sequence[int], capacities: Sequence[int],
              processing_times: Sequence, releases: Iterable = ()) -> "Instance":
        """Shorthand taking one sequence per stage attribute."""
        if not len(machines) == len(capacities) == len(processing_times):
            raise InvalidInstanceError("stage attribute lists differ in length")
        stages = tuple(StageConfig(m, b, as_fraction(p))
                       for m, b, p in zip(machines, capacities, processing_times))
        return cls(stages, tuple(releases))

    @classmethod
    def from_unsorted(cls, stages, releases) -> "Instance":
        """Sort releases into earliest-release-date order (stable on input index)."""
        return cls(tuple(stages), tuple(sorted(as_fraction(r) for r in releases)))

    @property
    def n(self) -> int:
        return len(self.releases)

    @property
    def s(self) -> int:
        return len(self.stages)

    def with_releases(self, releases) -> "Instance":
        return Instance(self.stages, tuple(releases))

    def total_processing(self, upto: Optional[int] = None) -> Fraction:
        """Sum of processing times of stages ``0..upto`` (inclusive), or of all."""
        last = self.s - 1 if upto is None else upto
        return sum((st.processing_time for st in self.stages[: last + 1]), Fraction(0))

    def to_json(self) -> dict:
        return {
            "stages": [st.to_json() for st in self.stages],
            "releases": [format_fraction(r) for r in self.releases],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "Instance":
        try:
            stages = tuple(
                StageConfig(int(st["machines"]), int(st["batch_capacity"]),
                            as_fraction(st["processing_time"]))
                for st in obj["stages"]
            )
            releases = tuple(as_fraction(r) for r in obj.get("releases", []))
        except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
            raise InvalidInstanceError(f"malformed instance JSON: {exc}") from exc
        return cls(stages, releases)


@dataclass(frozen=True)
class Report:
    """Outcome of a validation: ``ok`` plus the first violated invariant."""

    ok: bool
    reason: Optional[str] = None
    is_erd_permutation: Optional[bool] = None

    def __bool__(self):
        return self.ok


def validate_instance(inst: Instance) -> Report:
    if inst.s < 1:
        return Report(False, "instance has no stages")
    for i, st in enumerate(inst.stages):
        if st.machines < 1:
            return Report(False, f"stage {i}: machines must be >= 1")
        if st.batch_capacity < 1:
            return Report(False, f"stage {i}: batch capacity must be >= 1")
        if st.processing_time <= 0:
            return Report(False, f"stage {i}: processing time must be > 0")
    for j, r in enumerate(inst.releases):
        if r < 0:
            return Report(False, f"job {j}: negative release date")
        if j and r < inst.releases[j - 1]:
            return Report(False, "releases not sorted")
    return Report(True)


def require_valid(inst: Instance) -> Instance:
    rep = validate_instance(inst)
    if not rep:
        raise InvalidInstanceError(rep.reason)
    return inst


@dataclass(frozen=True)
class BatchAssignment:
    stage: int
    machine: int
    start: QTime
    jobs: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "start", QTime.coerce(self.start))
        object.__setattr__(self, "jobs", tuple(sorted(self.jobs)))

    def to_json(self) -> dict:
        return {"stage": self.stage, "machine": self.machine,
                "start": self.start.to_json(), "jobs": list(self.jobs)}

    @classmethod
    def from_json(cls, obj: dict) -> "BatchAssignment":
        return cls(int(obj["stage"]), int(obj["machine"]),
                   QTime.from_json(obj["start"]), tuple(int(j) for j in obj["jobs"]))


def _batch_key(batch: BatchAssignment):
    return (batch.stage, batch.start, batch.machine, batch.jobs)


@dataclass(frozen=True)
class Schedule:
    """Batches for an instance; completion times are derived on demand.

    Batches are kept in canonical order (stage, start, machine, jobs) so two
    schedules with the same content compare and serialize identically.
    """

    instance: Instance
    batches: tuple[BatchAssignment, ...]
    _starts: Optional[tuple] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "batches", tuple(sorted(self.batches, key=_batch_key)))

    def _start_table(self):
        # (s x n) start times, None where a job is missing at a stage
        if self._starts is None:
            table = [[None] * self.instance.n for _ in range(self.instance.s)]
            for batch in self.batches:
                if 0 <= batch.stage < self.instance.s:
                    for j in batch.jobs:
                        if 0 <= j < self.instance.n:
                            table[batch.stage][j] = batch.start
            object.__setattr__(self, "_starts", tuple(tuple(row) for row in table))
        return self._starts

    def start(self, i: int, j: int) -> QTime:
        value = self._start_table()[i][j]
        if value is None:
            raise InfeasibleScheduleError(f"job {j} has no batch at stage {i}")
        return value

    def completion(self, i: int, j: int) -> QTime:
        return self.start(i, j) + self.instance.stages[i].processing_time

    def completion_matrix(self) -> list[list[QTime]]:
        return [[self.completion(i, j) for j in range(self.instance.n)]
                for i in range(self.instance.s)]

    def job_completions(self) -> list[QTime]:
        last = self.instance.s - 1
        return [self.completion(last, j) for j in range(self.instance.n)]

    @property
    def is_erd_permutation(self) -> bool:
        return validate_schedule(self).is_erd_permutation

    def to_json(self) -> dict:
        return {"batches": [b.to_json() for b in self.batches]}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), separators=(",", ":"))

    @classmethod
    def from_json(cls, obj: dict, instance: Instance) -> "Schedule":
        try:
            batches = tuple(BatchAssignment.from_json(b) for b in obj["batches"])
        except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
            raise InfeasibleScheduleError(f"malformed schedule JSON: {exc}") from exc
        return cls(instance, batches)


def validate_schedule(sched: Schedule) -> Report:
    """Check feasibility; also report whether the schedule is ERD-permutation."""
    inst = sched.instance
    rep = validate_instance(inst)
    if not rep:
        return Report(False, f"invalid instance: {rep.reason}")
    seen = [[0] * inst.n for _ in range(inst.s)]
    per_machine: dict[tuple[int, int], list[QTime]] = {}
    for batch in sched.batches:
        if not 0 <= batch.stage < inst.s:
            return Report(False, f"batch on unknown stage {batch.stage}")
        st = inst.stages[batch.stage]
        if not 0 <= batch.machine < st.machines:
            return Report(False, f"stage {batch.stage}: unknown machine {batch.machine}")
        if not batch.jobs:
            return Report(False, "empty batch")
        if len(batch.jobs) > st.batch_capacity:
            return Report(False, f"stage {batch.stage}: batch over capacity")
        if batch.start < 0:
            return Report(False, "negative start time")
        for j in batch.jobs:
            if not 0 <= j < inst.n:
                return Report(False, f"unknown job {j}")
            seen[batch.stage][j] += 1
        per_machine.setdefault((batch.stage, batch.machine), []).append(batch.start)
    for i in range(inst.s):
        for j in range(inst.n):
            if seen[i][j] != 1:
                return Report(False, f"job {j} appears {seen[i][j]} times at stage {i}")
    for (i, k), starts in per_machine.items():
        p = inst.stages[i].processing_time
        starts.sort()
        for a, b in zip(starts, starts[1:]):
            if b < a + p:
                return Report(False, f"machine overlap on stage {i} machine {k}")
    for j in range(inst.n):
        if sched.start(0, j) < inst.releases[j]:
            return Report(False, f"start before release (job {j})")
        for i in range(1, inst.s):
            if sched.start(i, j) < sched.completion(i - 1, j):
                return Report(False,
                              f"start before previous-stage completion (job {j}, stage {i})")
    erd = all(sched.completion(i, j - 1) <= sched.completion(i, j)
              for i in range(inst.s) for j in range(1, inst.n))
    if erd:
        # implied by capacity feasibility; a failure here means a checker bug
        for i, st in enumerate(inst.stages):
            p, w = st.processing_time, st.slots
            for j in range(w, inst.n):
                assert sched.completion(i, j) >= sched.completion(i, j - w) + p
    return Report(True, is_erd_permutation=erd)


def require_feasible(sched: Schedule) -> Schedule:
    rep = validate_schedule(sched)
    if not rep:
        raise InfeasibleScheduleError(rep.reason)
    return sched


class ObjectiveKind(enum.Enum):
    MAKESPAN = "cmax"
    TOTAL_COMPLETION = "sumc"
    MAX_FLOW = "fmax"
    TOTAL_FLOW = "sumf"

    @classmethod
    def parse(cls, text) -> "ObjectiveKind":
        if isinstance(text, cls):
            return text
        for kind in cls:
            if text.lower() in (kind.value, kind.name.lower()):
                return kind
        raise ValueError(f"unknown objective {text!r}")


def objective_from_completions(completions: Sequence, releases: Sequence,
                               kind: ObjectiveKind) -> QTime:
    """Objective value for a vector of final-stage completion times."""
    if not completions:
        raise UndefinedObjectiveError("objective undefined for an instance without jobs")
    cs = [QTime.coerce(c) for c in completions]
    if kind is ObjectiveKind.MAKESPAN:
        return max(cs)
    if kind is ObjectiveKind.TOTAL_COMPLETION:
        return sum(cs, QTime(0))
    flows = [c - r for c, r in zip(cs, releases)]
    if kind is ObjectiveKind.MAX_FLOW:
        return max(flows)
    return sum(flows, QTime(0))


def evaluate_objective(sched: Schedule, kind: ObjectiveKind) -> QTime:
    kind = ObjectiveKind.parse(kind)
    if sched.instance.n == 0:
        raise UndefinedObjectiveError("objective undefined for an instance without jobs")
    return objective_from_completions(sched.job_completions(), sched.instance.releases, kind)


def load_instance(path) -> Instance:
    with open(path) as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InvalidInstanceError(f"malformed JSON in {path}: {exc}") from exc
    return Instance.from_json(obj)


def dump_instance(inst: Instance, path) -> None:
    with open(path, "w") as fh:
        json.dump(inst.to_json(), fh, indent=2)
        fh.write("\n")
