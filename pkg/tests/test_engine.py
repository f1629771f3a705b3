from fractions import Fraction

import pytest
from hypothesis import given, settings

from conftest import two_stage_demo, two_stage_optimal_schedule, instances
from pffb.adversary import adversary_sum_cj
from pffb.engine import Decision, EventKind, JobSource, simulate, run_adversary_game
from pffb.errors import CausalityError, DeadlockError, IllegalDecisionError
from pffb.model import Instance, ObjectiveKind, evaluate_objective, validate_schedule
from pffb.qtime import QTime
from pffb.strategies import DelayedStart, NeverWait


class Scripted:
    """Returns a fixed list of decisions, one per decision point."""

    name = "scripted"

    def __init__(self, decisions):
        self.decisions = list(decisions)

    def decide(self, state):
        return self.decisions.pop(0) if self.decisions else Decision()


class Idle:
    name = "idle"

    def decide(self, state):
        return Decision()


def test_two_stage_never_wait_is_optimal():
    trace = simulate(two_stage_demo(), NeverWait())
    assert trace.schedule == two_stage_optimal_schedule()
    assert evaluate_objective(trace.schedule, ObjectiveKind.MAKESPAN) == 11


def test_empty_instance():
    trace = simulate(Instance.build((1,), (2,), (1,), ()), NeverWait())
    assert trace.schedule.batches == ()
    assert trace.steps == ()


def test_single_job():
    trace = simulate(Instance.build((1,), (1,), (1,), (0,)), NeverWait())
    assert trace.schedule.job_completions() == [1]


def test_release_before_completion_at_same_instant():
    # job 1 arrives exactly when the machine frees up and must be seen at once
    inst = Instance.build((1,), (2,), (1,), (0, 1))
    trace = simulate(inst, NeverWait())
    kinds = [e.kind for e in trace.steps[1].events]
    assert kinds == [EventKind.RELEASE, EventKind.COMPLETION]
    assert trace.schedule.start(0, 1) == 1


def test_illegal_decisions_rejected():
    inst = Instance.build((1,), (1,), (1,), (0, 0))
    with pytest.raises(IllegalDecisionError, match="skip ahead"):
        simulate(inst, Scripted([Decision(((0, 0, (1,)),))]))
    with pytest.raises(IllegalDecisionError, match="batch size"):
        simulate(inst, Scripted([Decision(((0, 0, (0, 1)),))]))
    with pytest.raises(IllegalDecisionError, match="not idle"):
        simulate(Instance.build((1,), (2,), (1,), (0, 0)),
                 Scripted([Decision(((0, 0, (0,)), (0, 0, (1,))))]))
    with pytest.raises(IllegalDecisionError, match="not available"):
        simulate(Instance.build((1, 1), (1, 1), (1, 1), (0,)),
                 Scripted([Decision(((1, 0, (0,)),))]))
    with pytest.raises(IllegalDecisionError, match="future"):
        simulate(inst, Scripted([Decision((), (QTime(0),))]))


def test_unreleased_job_is_invisible():
    inst = Instance.build((1,), (2,), (1,), (0, 5))
    with pytest.raises(IllegalDecisionError, match="not available"):
        simulate(inst, Scripted([Decision(((0, 0, (0, 1)),))]))


def test_deadlock_detected():
    with pytest.raises(DeadlockError):
        simulate(Instance.build((1,), (1,), (1,), (0,)), Idle())


class LateSource(JobSource):
    stages = Instance.build((1,), (1,), (1,)).stages

    def initial_releases(self):
        return [Fraction(0)]

    def observe(self, time, decision, state):
        return [Fraction(0)] if time == 0 else []

    def exhausted(self, n):
        return True


def test_causality_enforced():
    with pytest.raises(CausalityError):
        simulate(LateSource(), NeverWait())


def test_adversary_case1_never_wait():
    script = adversary_sum_cj(4)
    trace, inst = run_adversary_game(script, NeverWait())
    assert inst.n == 4
    assert inst.releases[1:] == (script.eps,) * 3
    assert trace.schedule.start(0, 0) == 0


def test_adversary_case2_sleeper():
    trace, inst = run_adversary_game(adversary_sum_cj(4), DelayedStart(2))
    assert inst.n == 1
    assert trace.schedule.start(0, 0) == 2


class Silent(JobSource):
    stages = Instance.build((1,), (1,), (1,)).stages

    def exhausted(self, n):
        return True


def test_adversary_without_jobs():
    trace, inst = run_adversary_game(Silent(), NeverWait())
    assert inst.n == 0 and trace.schedule.batches == ()


@settings(max_examples=80, deadline=None)
@given(instances())
def test_traces_are_deterministic_and_feasible(inst):
    a = simulate(inst, NeverWait())
    b = simulate(inst, NeverWait())
    assert a.to_json() == b.to_json()
    rep = validate_schedule(a.schedule)
    assert rep.ok and (inst.n == 0 or rep.is_erd_permutation)
    times = [st.time for st in a.steps]
    assert times == sorted(times) and len(set(times)) == len(times)
