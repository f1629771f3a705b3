"""Proportionate flow shops of batching machines: bounds, simulation, optima."""

from .bounds import lower_bound_matrix, pff_correspondence, simple_lower_bound, sung_bound
from .engine import Decision, SimState, simulate
from .errors import (
    CausalityError,
    DeadlockError,
    IllegalDecisionError,
    InfeasibleScheduleError,
    InvalidInstanceError,
    PFFBError,
    SizeCapError,
    UndefinedObjectiveError,
    UnsupportedInstanceError,
)
from .model import (
    BatchAssignment,
    Instance,
    ObjectiveKind,
    Schedule,
    StageConfig,
    evaluate_objective,
    validate_instance,
    validate_schedule,
)
from .oracle import competitive_ratio, optimal_permutation_schedule, optimal_schedule_all_orders
from .qtime import PHI, SQRT5, QTime, compare_qtime
from .strategies import FullBatch, NeverWait, TSwitch, make_strategy

__version__ = "0.1.0"
