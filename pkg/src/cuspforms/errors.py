"""Exception hierarchy shared by all modules."""


class CuspFormsError(Exception):
    """Base class for every error raised by the package."""


class PreconditionError(CuspFormsError, ValueError):
    """An operation was called outside its domain."""


class ZeroInputError(PreconditionError):
    """A nonzero rational was required."""


class DegenerateFormError(PreconditionError):
    """The symmetric matrix has zero determinant."""


class RankMismatchError(PreconditionError):
    pass


class SignatureError(PreconditionError):
    pass


class InfeasibleTargetError(PreconditionError):
    """No form realizes the requested invariants."""

    def __init__(self, violated):
        self.violated = list(violated)
        super().__init__(f"target profile is infeasible; violated conditions {self.violated}")


class FormSyntaxError(PreconditionError):
    def __init__(self, message, text="", position=None):
        self.text = text
        self.position = position
        where = f" at position {position}" if position is not None else ""
        super().__init__(f"{message}{where}")


class NotCrystallographicError(CuspFormsError):
    """Closure produced more linear parts than a finite holonomy group allows."""


class SearchExhaustedError(CuspFormsError):
    """A bounded search finished without a witness. This is not a disproof."""
