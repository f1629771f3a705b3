class PFFBError(Exception):
    """Base class for all errors raised by this package."""


class InvalidInstanceError(PFFBError, ValueError):
    pass


class InfeasibleScheduleError(PFFBError, ValueError):
    pass


class UndefinedObjectiveError(PFFBError, ValueError):
    """Objective requested on an instance without jobs."""


class UnsupportedInstanceError(PFFBError, ValueError):
    """The operation's structural precondition does not hold for the instance."""


class SizeCapError(PFFBError):
    """Exhaustive enumeration refused because the instance is too large."""


class IllegalDecisionError(PFFBError):
    pass


class DeadlockError(PFFBError):
    pass


class CausalityError(PFFBError):
    pass
