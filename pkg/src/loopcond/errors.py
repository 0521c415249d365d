class LoopCondError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(LoopCondError, ValueError):
    def __init__(self, message, text=None, pos=None):
        if pos is not None:
            message = f"{message} at position {pos}"
        super().__init__(message)
        self.text = text
        self.pos = pos


class ArityError(LoopCondError, ValueError):
    pass


class BudgetExceeded(LoopCondError):
    """An exponential construction would exceed its configured budget."""

    def __init__(self, what, required, limit):
        super().__init__(f"{what}: required {required} exceeds budget {limit}")
        self.what = what
        self.required = required
        self.limit = limit
