"""Exhaustive offline optima at desk scale.

Within ERD permutation schedules the only decision left per stage is how to
cut the job sequence into batches.  Jobs sharing a batch finish together,
and swapping two jobs with equal completion times changes nothing, so it is
enough to enumerate cuts of ``0..n-1`` into consecutive blocks of size at
most ``b_i``.  For a fixed cut, starting every batch as early as possible
gives componentwise minimal completion times, hence is optimal for every
regular objective.  Machine identity never affects completion times, so
batches go to the lowest-indexed free machine.
"""

from __future__ import annotations

import itertools
import math
import os
import sys
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Sequence

import numpy as np

from . import _kernels
from .errors import SizeCapError, UndefinedObjectiveError, UnsupportedInstanceError
from .model import (
    BatchAssignment,
    Instance,
    ObjectiveKind,
    Schedule,
    evaluate_objective,
    require_valid,
)
from .qtime import QTime

DEFAULT_CAP = 9
ALL_ORDERS_CAP = 6
# refuse enumerations whose (states x compositions) table would exceed this
MAX_TABLE_ROWS = 50_000_000
_CHUNK_CELLS = 1 << 22

_KIND_CODE = {
    ObjectiveKind.MAKESPAN: _kernels.MAKESPAN,
    ObjectiveKind.TOTAL_COMPLETION: _kernels.TOTAL_COMPLETION,
    ObjectiveKind.MAX_FLOW: _kernels.MAX_FLOW,
    ObjectiveKind.TOTAL_FLOW: _kernels.TOTAL_FLOW,
}

Composition = tuple[int, ...]  # block sizes at one stage
BatchComposition = tuple[Composition, ...]  # one composition per stage


def oracle_cap(cap: Optional[int] = None) -> int:
    if cap is not None:
        return int(cap)
    env = os.environ.get("PFFB_ORACLE_CAP")
    return int(env) if env else DEFAULT_CAP


def compositions(n: int, b: int) -> list[Composition]:
    """Compositions of ``n`` with parts in ``1..b``, lexicographic order."""
    return list(_compositions(n, b))


@lru_cache(maxsize=None)
def _compositions(n: int, b: int) -> tuple[Composition, ...]:
    if n == 0:
        return ((),)
    out = []
    for first in range(1, min(b, n) + 1):
        out.extend((first,) + rest for rest in _compositions(n - first, b))
    return tuple(out)


@lru_cache(maxsize=None)
def _encode(n: int, b: int):
    comps = _compositions(n, b)
    block_last = np.full((len(comps), n), -1, dtype=np.int64)
    block_of = np.zeros((len(comps), n), dtype=np.int64)
    for k, comp in enumerate(comps):
        j = 0
        for q, size in enumerate(comp):
            block_of[k, j:j + size] = q
            j += size
            block_last[k, q] = j - 1
    block_last.setflags(write=False)
    block_of.setflags(write=False)
    return block_last, block_of


def check_composition(inst: Instance, comp: BatchComposition) -> None:
    if len(comp) != inst.s:
        raise ValueError("one composition per stage required")
    for i, blocks in enumerate(comp):
        if sum(blocks) != inst.n or any(not 1 <= q <= inst.stages[i].batch_capacity
                                        for q in blocks):
            raise ValueError(f"stage {i}: invalid composition {blocks}")


def earliest_start_schedule(inst: Instance, comp: BatchComposition) -> Schedule:
    """Realize a fixed batching with every batch started as early as possible."""
    require_valid(inst)
    check_composition(inst, comp)
    ready = [Fraction(r) for r in inst.releases]
    batches = []
    for i, (st, blocks) in enumerate(zip(inst.stages, comp)):
        free = [Fraction(0)] * st.machines
        done = list(ready)
        j = 0
        for size in blocks:
            jobs = tuple(range(j, j + size))
            j += size
            start = max(max(ready[x] for x in jobs), min(free))
            k = next(idx for idx, t in enumerate(free) if t <= start)
            free[k] = start + st.processing_time
            batches.append(BatchAssignment(i, k, QTime(start), jobs))
            for x in jobs:
                done[x] = start + st.processing_time
        ready = done
    return Schedule(inst, tuple(batches))


@dataclass(frozen=True)
class _Scaled:
    """Instance data as integers over the common denominator ``scale``."""

    scale: int
    releases: np.ndarray
    p: tuple[int, ...]
    dtype: object

    def unscale(self, value) -> Fraction:
        return Fraction(int(value), self.scale)


def _scaled(inst: Instance) -> _Scaled:
    values = list(inst.releases) + [st.processing_time for st in inst.stages]
    scale = 1
    for v in values:
        scale = scale * v.denominator // math.gcd(scale, v.denominator)
    releases = [int(r * scale) for r in inst.releases]
    p = tuple(int(st.processing_time * scale) for st in inst.stages)
    horizon = (max(releases, default=0) + inst.n * sum(p)) * max(inst.n, 1)
    dtype = np.int64 if horizon < 2 ** 62 else object
    return _Scaled(scale, np.array(releases, dtype=dtype), p, dtype)


def _dedupe_first(rows: np.ndarray) -> np.ndarray:
    """Indices of first occurrences of distinct rows, in original order."""
    if rows.dtype == object:
        seen = {}
        for idx, row in enumerate(map(tuple, rows)):
            seen.setdefault(row, idx)
        return np.fromiter(seen.values(), dtype=np.int64, count=len(seen))
    _, first = np.unique(rows, axis=0, return_index=True)
    return np.sort(first)


def _enumerate(inst: Instance, kind: ObjectiveKind):
    """Brute force over all per-stage compositions; returns (composition, value)."""
    data = _scaled(inst)
    n = inst.n
    states = data.releases.reshape(1, n)
    lineage: list[tuple[np.ndarray, np.ndarray]] = []
    code = _KIND_CODE[kind]
    best_val, best_state, best_comp = None, -1, -1
    for i, st in enumerate(inst.stages):
        block_last, block_of = _encode(n, st.batch_capacity)
        K = block_last.shape[0]
        if len(states) * K > MAX_TABLE_ROWS:
            raise SizeCapError(f"stage {i}: {len(states)} states x {K} compositions "
                               "exceeds the enumeration budget")
        chunk = max(1, _CHUNK_CELLS // max(1, K * n))
        last_stage = i == inst.s - 1
        kept_rows, kept_parent, kept_comp = [], [], []
        seen: dict = {}
        for lo in range(0, len(states), chunk):
            part = states[lo:lo + chunk]
            done = _kernels.expand_stage(part, block_last, block_of,
                                         st.machines, data.p[i])
            if last_stage:
                vals = _kernels.objective_values(done, data.releases, code)
                pos = int(np.argmin(vals))
                if best_val is None or vals[pos] < best_val:
                    best_val = vals[pos]
                    best_state, best_comp = lo + pos // K, pos % K
                continue
            for idx in _dedupe_first(done):
                key = done[idx].tobytes() if done.dtype != object else tuple(done[idx])
                if key in seen:
                    continue
                seen[key] = True
                kept_rows.append(done[idx])
                kept_parent.append(lo + idx // K)
                kept_comp.append(idx % K)
        if not last_stage:
            states = np.array(kept_rows, dtype=data.dtype).reshape(len(kept_rows), n)
            lineage.append((np.array(kept_parent, dtype=np.int64),
                            np.array(kept_comp, dtype=np.int64)))
    chosen = [best_comp]
    state = best_state
    for parents, comps in reversed(lineage):
        chosen.append(int(comps[state]))
        state = int(parents[state])
    chosen.reverse()
    comp = tuple(_compositions(n, st.batch_capacity)[k]
                 for st, k in zip(inst.stages, chosen))
    return comp, data.unscale(best_val)


def _single_stage_dp(inst: Instance, kind: ObjectiveKind) -> Composition:
    """Exact optimum for one stage via a prefix recursion.

    The state after batching jobs ``0..j-1`` is ``j`` plus the sorted machine
    free times, each clamped up to the availability of job ``j`` (nothing can
    start earlier anyway).  Equal states share their optimal suffix; ties go
    to the smallest first block, which yields the lexicographically smallest
    composition.
    """
    data = _scaled(inst)
    r = [int(x) for x in data.releases]
    st = inst.stages[0]
    n, m, b, p = inst.n, st.machines, st.batch_capacity, data.p[0]
    prefix = [0]
    for x in r:
        prefix.append(prefix[-1] + x)
    is_max = kind in (ObjectiveKind.MAKESPAN, ObjectiveKind.MAX_FLOW)
    memo: dict = {}

    def solve(j: int, free: tuple[int, ...]):
        if j == n:
            return (None if is_max else 0), ()
        key = (j, free)
        hit = memo.get(key)
        if hit is not None:
            return hit
        best = None
        for size in range(1, min(b, n - j) + 1):
            last = j + size - 1
            start = max(r[last], free[0])
            end = start + p
            if kind is ObjectiveKind.MAKESPAN:
                here = end
            elif kind is ObjectiveKind.TOTAL_COMPLETION:
                here = size * end
            elif kind is ObjectiveKind.MAX_FLOW:
                here = end - r[j]
            else:
                here = size * end - (prefix[last + 1] - prefix[j])
            if last + 1 < n:
                floor = r[last + 1]
                nxt = tuple(sorted(max(t, floor) for t in free[1:] + (end,)))
            else:
                nxt = ()
            tail_val, tail_comp = solve(last + 1, nxt)
            if is_max:
                total = here if tail_val is None else max(here, tail_val)
            else:
                total = here + tail_val
            if best is None or total < best[0]:
                best = (total, (size,) + tail_comp)
        memo[key] = best
        return best

    start_free = tuple([r[0]] * m)
    limit = sys.getrecursionlimit()
    if limit < 4 * n + 100:
        sys.setrecursionlimit(4 * n + 100)
    try:
        return solve(0, start_free)[1]
    finally:
        sys.setrecursionlimit(limit)


def optimal_permutation_schedule(inst: Instance, kind, cap: Optional[int] = None):
    """Offline optimum over ERD permutation schedules: ``(schedule, value)``.

    Enumerates every composition at every stage (with exact-equality merging
    of identical intermediate states).  Single-stage instances above the cap
    are solved exactly by a prefix recursion instead.
    """
    kind = ObjectiveKind.parse(kind)
    require_valid(inst)
    if inst.n == 0:
        raise UndefinedObjectiveError("objective undefined for an instance without jobs")
    limit = oracle_cap(cap)
    if inst.n <= limit:
        comp, _ = _enumerate(inst, kind)
    elif inst.s == 1:
        comp = (_single_stage_dp(inst, kind),)
    else:
        raise SizeCapError(f"n={inst.n} exceeds oracle cap {limit}")
    sched = earliest_start_schedule(inst, comp)
    return sched, evaluate_objective(sched, kind)


def optimal_value(inst: Instance, kind, cap: Optional[int] = None) -> QTime:
    return optimal_permutation_schedule(inst, kind, cap)[1]


# -- all job orders ----------------------------------------------------------

@lru_cache(maxsize=None)
def _ordered_batchings(n: int, b: int) -> tuple[tuple[tuple[int, ...], ...], ...]:
    """Every sequence of disjoint batches (size <= b) covering jobs 0..n-1."""
    out = []

    def grow(remaining: tuple[int, ...], acc):
        if not remaining:
            out.append(tuple(acc))
            return
        for size in range(1, min(b, len(remaining)) + 1):
            for batch in itertools.combinations(remaining, size):
                rest = tuple(x for x in remaining if x not in batch)
                acc.append(batch)
                grow(rest, acc)
                acc.pop()

    grow(tuple(range(n)), [])
    return tuple(out)


def _pareto(vectors) -> list[tuple[int, ...]]:
    """Drop vectors dominated componentwise by another (exact, regular objectives)."""
    uniq = sorted(set(vectors), key=lambda v: (sum(v), v))
    front: list[tuple[int, ...]] = []
    for v in uniq:
        if not any(all(a <= c for a, c in zip(u, v)) for u in front):
            front.append(v)
    return front


def optimal_schedule_all_orders(inst: Instance, kind, cap: int = ALL_ORDERS_CAP) -> QTime:
    """Optimum over all schedules, with no ordering assumption at any stage.

    Each stage picks any sequence of batches (the order in which they start);
    for a fixed sequence the earliest feasible starts are
    ``max(ready, previous start, earliest machine release)``.  Job-indexed
    completion vectors dominated componentwise by another are discarded,
    which is exact for regular objectives.
    """
    kind = ObjectiveKind.parse(kind)
    require_valid(inst)
    if inst.n == 0:
        raise UndefinedObjectiveError("objective undefined for an instance without jobs")
    if inst.n > cap:
        raise SizeCapError(f"n={inst.n} exceeds all-orders cap {cap}")
    data = _scaled(inst)
    r = [int(x) for x in data.releases]
    states = [tuple(r)]
    for i, st in enumerate(inst.stages):
        p, m = data.p[i], st.machines
        produced = []
        for ready in states:
            for seq in _ordered_batchings(inst.n, st.batch_capacity):
                free = [0] * m
                prev = 0
                done = [0] * inst.n
                for batch in seq:
                    k = min(range(m), key=free.__getitem__)
                    start = max(max(ready[x] for x in batch), free[k], prev)
                    free[k] = start + p
                    prev = start
                    for x in batch:
                        done[x] = start + p
                produced.append(tuple(done))
        states = _pareto(produced)
    best = None
    for vec in states:
        if kind is ObjectiveKind.MAKESPAN:
            val = max(vec)
        elif kind is ObjectiveKind.TOTAL_COMPLETION:
            val = sum(vec)
        elif kind is ObjectiveKind.MAX_FLOW:
            val = max(c - x for c, x in zip(vec, r))
        else:
            val = sum(vec) - sum(r)
        best = val if best is None else min(best, val)
    return QTime(data.unscale(best))


def competitive_ratio(alg: Schedule, inst: Instance, kind,
                      optimum: Optional[QTime] = None, cap: Optional[int] = None) -> QTime:
    """Objective of ``alg`` divided by the offline optimum (exact)."""
    kind = ObjectiveKind.parse(kind)
    if optimum is None:
        optimum = optimal_value(inst, kind, cap)
    if optimum.sign() <= 0:
        raise UnsupportedInstanceError("optimum must be positive")
    return evaluate_objective(alg, kind) / optimum
