"""Exception hierarchy shared by every module of the package."""


class BehaviorAuthError(ValueError):
    """Base class for all data, fitting and authentication errors."""


class NonMonotonicTimestamps(BehaviorAuthError):
    pass


class NonFiniteValue(BehaviorAuthError):
    pass


class LengthMismatch(BehaviorAuthError):
    pass


class OutOfRange(BehaviorAuthError):
    pass


class SeriesTooShort(BehaviorAuthError):
    pass


class NoPeriodFound(BehaviorAuthError):
    pass


class PeriodUnresolved(BehaviorAuthError):
    pass


class SingularDesign(BehaviorAuthError):
    pass


class InsufficientCycles(BehaviorAuthError):
    pass


class UnknownAction(BehaviorAuthError, KeyError):
    def __str__(self):
        return ValueError.__str__(self)


class WindowTooShort(BehaviorAuthError):
    pass


class WindowPrecedesTraining(BehaviorAuthError):
    pass


class TimestampMismatch(BehaviorAuthError):
    pass


class AxisMisalignment(BehaviorAuthError):
    pass


class ParseError(BehaviorAuthError):
    """A malformed line in an input file.

    ``line`` is 1-based and counts the header.
    """

    def __init__(self, line, reason):
        self.line = line
        self.reason = reason
        super().__init__(f"line {line}: {reason}")
