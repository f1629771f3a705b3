"""Adversarial job sources and worst-case instance families."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .engine import Decision, JobSource, SimState, SimulationTrace, run_adversary_game
from .errors import InvalidInstanceError, UnsupportedInstanceError
from .model import (
    BatchAssignment,
    Instance,
    ObjectiveKind,
    Schedule,
    StageConfig,
    evaluate_objective,
)
from .oracle import optimal_permutation_schedule
from .qtime import PHI, QTime, as_fraction


def default_eps(b1: int) -> Fraction:
    return Fraction(1, 10 * b1)


class ThresholdAdversary(JobSource):
    """One stage, one machine, unit processing time, capacity ``b1``.

    The first job arrives at 0.  If the strategy starts it at some ``t`` no
    later than ``threshold``, ``b1 - 1`` more jobs arrive at ``t + eps``;
    otherwise the first job stays the only one.
    """

    def __init__(self, b1: int, eps, threshold: QTime, objective: ObjectiveKind, name: str):
        if b1 < 1:
            raise ValueError("b1 must be positive")
        eps = as_fraction(eps)
        if eps <= 0:
            raise ValueError("eps must be positive")
        self.b1, self.eps, self.threshold = b1, eps, QTime.coerce(threshold)
        self.objective = objective
        self.name = name
        self.stages = (StageConfig(1, b1, Fraction(1)),)
        self.decided = False
        self.triggered_at: Optional[QTime] = None

    def initial_releases(self):
        return [Fraction(0)]

    def observe(self, time: QTime, decision: Decision, state: SimState):
        if self.decided:
            return []
        started_first = any(i == 0 and 0 in jobs for i, _, jobs in decision.starts)
        if started_first and time <= self.threshold:
            self.decided = True
            self.triggered_at = time
            if not time.is_rational:
                raise UnsupportedInstanceError("adversary needs a rational trigger time")
            return [time.to_fraction() + self.eps] * (self.b1 - 1)
        if started_first or time > self.threshold:
            self.decided = True
        return []

    def exhausted(self, n_released):
        if not self.decided:
            return False
        expected = self.b1 if self.triggered_at is not None else 1
        return n_released == expected


def adversary_sum_cj(b1: int, eps=None) -> ThresholdAdversary:
    """Total-completion-time adversary, switching at ``phi - 1``."""
    return ThresholdAdversary(b1, default_eps(b1) if eps is None else eps,
                              PHI - 1, ObjectiveKind.TOTAL_COMPLETION, "sumcj")


def adversary_sum_fj(b1: int, eps=None) -> ThresholdAdversary:
    """Total-flow-time adversary, switching at 1."""
    return ThresholdAdversary(b1, default_eps(b1) if eps is None else eps,
                              QTime(1), ObjectiveKind.TOTAL_FLOW, "sumfj")


@dataclass(frozen=True)
class GameResult:
    trace: SimulationTrace
    instance: Instance
    objective: ObjectiveKind
    value: QTime
    optimum: QTime
    optimal_schedule: Schedule

    @property
    def ratio(self) -> QTime:
        return self.value / self.optimum

    def to_json(self) -> dict:
        return {
            "objective": self.objective.value,
            "instance": self.instance.to_json(),
            "value": self.value.to_json(),
            "optimum": self.optimum.to_json(),
            "ratio": self.ratio.to_json(),
            "optimal_schedule": self.optimal_schedule.to_json(),
            "trace": self.trace.to_json(),
        }


def play(adversary: ThresholdAdversary, strategy) -> GameResult:
    """Run the game and score it against the exact offline optimum."""
    trace, inst = run_adversary_game(adversary, strategy)
    value = evaluate_objective(trace.schedule, adversary.objective)
    opt_sched, opt = optimal_permutation_schedule(inst, adversary.objective)
    return GameResult(trace, inst, adversary.objective, value, opt, opt_sched)


def tightness_capacity(alpha) -> int:
    alpha = as_fraction(alpha)
    if alpha <= 0:
        raise InvalidInstanceError("alpha must be positive")
    b1 = (4 - alpha) / alpha
    if b1.denominator != 1 or b1 < 1:
        raise InvalidInstanceError(f"(4 - alpha)/alpha = {b1} is not a positive integer")
    return int(b1)


def never_wait_tightness_instance(alpha, m1: int):
    """Staggered single-stage instance on which Never-Wait nearly doubles.

    ``b1 = (4 - alpha)/alpha``, ``eps = 1/(m1*b1)``, ``n = m1*b1`` jobs: the
    first ``m1`` arrive ``eps`` apart from 0, the rest all at ``m1*eps``.
    Returns the instance and the comparison schedule that idles until
    ``m1*eps`` and then starts ``m1`` full batches.
    """
    if m1 < 1:
        raise InvalidInstanceError("m1 must be positive")
    b1 = tightness_capacity(alpha)
    eps = Fraction(1, m1 * b1)
    n = m1 * b1
    releases = tuple(j * eps if j < m1 else m1 * eps for j in range(n))
    inst = Instance((StageConfig(m1, b1, Fraction(1)),), releases)
    batches = tuple(BatchAssignment(0, k, QTime(m1 * eps), tuple(range(k * b1, (k + 1) * b1)))
                    for k in range(m1))
    return inst, Schedule(inst, batches)


def never_wait_ratio_floors(alpha) -> dict:
    """Closed-form lower bounds on Never-Wait / comparison, per objective."""
    b = tightness_capacity(alpha)
    return {
        ObjectiveKind.MAKESPAN: Fraction(2 * b, b + 1),
        ObjectiveKind.TOTAL_COMPLETION: Fraction(2 * b - 1, b + 1),
        ObjectiveKind.MAX_FLOW: Fraction(2 * b - 1, b + 1),
        ObjectiveKind.TOTAL_FLOW: Fraction(2 * b - 2, b + 1),
    }


def full_batch_family(alpha: int):
    """Alternating-stage instance where waiting for full batches never pays.

    ``10*alpha`` single-machine stages and ``n = 5*alpha`` jobs released at 0.
    Odd stages (1-based) take 2 time units with capacity ``n``; even stages
    take 1 with capacity 1.  The comparison schedule uses singleton batches,
    starts job ``j`` (0-based) at ``2*j`` on the first stage and passes every
    job straight through afterwards.
    """
    if int(alpha) != alpha or alpha < 1:
        raise InvalidInstanceError("alpha must be a positive integer")
    alpha = int(alpha)
    n, s = 5 * alpha, 10 * alpha
    stages = tuple(StageConfig(1, n, Fraction(2)) if i % 2 == 0 else StageConfig(1, 1, Fraction(1))
                   for i in range(s))
    inst = Instance(stages, (Fraction(0),) * n)
    batches = []
    for j in range(n):
        t = Fraction(2 * j)
        for i, st in enumerate(stages):
            batches.append(BatchAssignment(i, 0, QTime(t), (j,)))
            t += st.processing_time
    return inst, Schedule(inst, tuple(batches))


def full_batch_makespans(alpha: int) -> tuple[int, int]:
    """Makespans of Full-Batch and of the comparison schedule on the family."""
    return 10 * alpha + 25 * alpha ** 2, 25 * alpha - 2


def small_capacity_families(b_max: int) -> list[Instance]:
    """Small single-stage stress instances with batch capacity at most 2.

    Best effort: staggered releases that make an online rule choose between
    starting early and waiting for a partner job.  Capacity 1 leaves nothing
    to decide, so ``b_max = 1`` yields no instances.
    """
    if not 1 <= b_max <= 2:
        raise ValueError("b_max must be 1 or 2")
    if b_max == 1:
        return []
    stage = (StageConfig(1, 2, Fraction(1)),)
    release_sets = [
        (0, Fraction(1, 2)),
        (0, Fraction(3, 5)),
        (0, Fraction(2, 3)),
        (0, 1),
        (0, Fraction(1, 2), Fraction(3, 2)),
        (0, Fraction(3, 5), Fraction(8, 5), Fraction(8, 5)),
    ]
    parallel = (StageConfig(2, 2, Fraction(1)),)
    out = [Instance(stage, tuple(Fraction(r) for r in rs)) for rs in release_sets]
    out.append(Instance(parallel, (Fraction(0), Fraction(1, 2), Fraction(1, 2), Fraction(3, 5))))
    return out


FAMILY_NAMES = ("sumcj", "sumfj", "nw-tight", "full-batch")
