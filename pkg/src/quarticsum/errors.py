"""Exception types shared by every module."""


class ParameterError(ValueError):
    """An argument violates an operation's precondition."""


class BudgetExceeded(RuntimeError):
    """A computation would exceed its configured enumeration or grid budget."""

    def __init__(self, what, required, budget):
        self.what = what
        self.required = required
        self.budget = budget
        super().__init__(f"{what}: requires {required:,} but budget is {budget:,}")


class PrecisionWarning(UserWarning):
    """Floating input cannot resolve the requested phases to useful accuracy."""
