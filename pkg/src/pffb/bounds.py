"""Completion-time lower bounds for ERD permutation schedules."""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .errors import UnsupportedInstanceError
from .model import Instance, ObjectiveKind, StageConfig, objective_from_completions, require_valid
from .qtime import QTime


class _NegInf:
    """Sentinel below every time; absorbs nothing under ``max``."""

    def __repr__(self):
        return "-inf"


NEG_INF = _NegInf()


def _max(x, y):
    if x is NEG_INF:
        return y
    if y is NEG_INF:
        return x
    return x if x >= y else y


@dataclass(frozen=True)
class BoundMatrix:
    """``values[i][j]`` bounds the completion of job ``j`` at stage ``i``."""

    values: tuple[tuple[QTime, ...], ...]
    row0: tuple[Fraction, ...]

    def __getitem__(self, ij) -> QTime:
        i, j = ij
        return self.values[i][j]

    @property
    def last_row(self) -> tuple[QTime, ...]:
        return self.values[-1] if self.values else ()

    def to_json(self) -> dict:
        return {
            "row0": [QTime(r).to_json() for r in self.row0],
            "values": [[v.to_json() for v in row] for row in self.values],
        }


def lower_bound_matrix(inst: Instance) -> BoundMatrix:
    """Evaluate ``c*[i][j] = max(c*[i-1][j], c*[i][j - m_i b_i]) + p_i``.

    Row ``-1`` is the release dates; entries with a nonpositive job index are
    ``-inf``.  O(n*s) additions and comparisons.
    """
    require_valid(inst)
    prev = [Fraction(r) for r in inst.releases]
    rows = []
    for st in inst.stages:
        w, p = st.slots, st.processing_time
        row: list[Fraction] = []
        for j in range(inst.n):
            back = row[j - w] if j >= w else NEG_INF
            row.append(_max(prev[j], back) + p)
        rows.append(row)
        prev = row
    return BoundMatrix(tuple(tuple(QTime(v) for v in row) for row in rows),
                       tuple(inst.releases))


def simple_lower_bound(inst: Instance, i: int, j: int) -> QTime:
    """``ceil((j+1) / (m_i b_i)) * p_i`` for 0-based job ``j``."""
    st = inst.stages[i]
    return QTime(math.ceil(Fraction(j + 1, st.slots)) * st.processing_time)


def sung_bound(inst: Instance) -> QTime:
    """Makespan bound for single-machine stages and zero release dates.

    For ``k = 1`` the first stage plays both roles and its shared batch is
    counted once.

    Max over a split job ``j`` and a bottleneck stage ``k`` of: batches of
    stage 0 up to ``j``, pass-through of stages 1..k-1, batches of stage
    ``k`` from ``j`` on, and pass-through of the remaining stages.
    """
    require_valid(inst)
    if inst.n < 1:
        raise UnsupportedInstanceError("bound needs at least one job")
    if any(st.machines != 1 for st in inst.stages):
        raise UnsupportedInstanceError("bound requires one machine per stage")
    if any(r != 0 for r in inst.releases):
        raise UnsupportedInstanceError("bound requires zero release dates")
    n, s = inst.n, inst.s
    p = [st.processing_time for st in inst.stages]
    b = [st.batch_capacity for st in inst.stages]
    best = None
    for j in range(1, n + 1):
        head = math.ceil(Fraction(j, b[0])) * p[0]
        for k in range(1, s + 1):
            # stage indices are 1-based inside this loop
            middle = sum(p[1:k - 1], Fraction(0))
            tail_batches = math.ceil(Fraction(n - j + 1, b[k - 1])) * p[k - 1]
            rest = sum(p[k:], Fraction(0))
            value = head + middle + tail_batches + rest
            if k == 1:
                # stage 0 is both head and bottleneck: count the shared batch once
                value -= p[0]
            if best is None or value > best:
                best = value
    return QTime(best)


def unbatched_instance(inst: Instance) -> Instance:
    """Replace every batching machine by ``b_i`` unit-capacity machines."""
    return Instance(tuple(StageConfig(st.slots, 1, st.processing_time) for st in inst.stages),
                    inst.releases)


def pff_correspondence(inst: Instance, check: bool = True) -> list[list[QTime]]:
    """Earliest-start ERD schedule of the instance without batching.

    Simulated machine by machine: each job starts once it has left the
    previous stage, all lower-indexed jobs have started here, and some unit
    machine is free.  With ``check`` the result is compared against
    :func:`lower_bound_matrix` entrywise.
    """
    require_valid(inst)
    flat = unbatched_instance(inst)
    ready = [Fraction(r) for r in flat.releases]
    rows = []
    for st in flat.stages:
        free = [Fraction(0)] * st.machines  # min-heap of machine free times
        heapq.heapify(free)
        last_start = Fraction(0)
        row = []
        for j in range(flat.n):
            earliest_machine = heapq.heappop(free)
            start = max(ready[j], earliest_machine, last_start)
            heapq.heappush(free, start + st.processing_time)
            last_start = start
            row.append(start + st.processing_time)
        rows.append(row)
        ready = row
    result = [[QTime(v) for v in row] for row in rows]
    if check:
        expected = lower_bound_matrix(inst)
        for i, row in enumerate(result):
            if tuple(row) != expected.values[i]:
                raise AssertionError(f"no-batching schedule differs from bound at stage {i}")
    return result


def bound_objective(inst: Instance, kind) -> Optional[QTime]:
    """Objective evaluated on the last bound row; a floor on the optimum."""
    if inst.n == 0:
        return None
    return objective_from_completions(list(lower_bound_matrix(inst).last_row),
                                      inst.releases, ObjectiveKind.parse(kind))
