"""Exception hierarchy shared by every synlab module."""


class SynlabError(Exception):
    """Base class for all errors raised by synlab."""


class ValidationError(SynlabError, ValueError):
    """Input violates a documented precondition."""


class ParseError(ValidationError):
    """Malformed text input; carries the offending line number when known."""

    def __init__(self, message, line=None, source=None):
        self.line = line
        self.source = source
        where = ""
        if source is not None and line is not None:
            where = f"{source}:{line}: "
        elif line is not None:
            where = f"line {line}: "
        super().__init__(where + message)


class CapacityError(SynlabError):
    """A configured size or search budget would be exceeded."""


class LimitReached(SynlabError):
    """A bounded search exhausted its length limit without an answer."""

    def __init__(self, limit, frontier):
        self.limit = limit
        self.frontier = frontier
        super().__init__(f"no synchronizing word of length <= {limit} "
                         f"(frontier of {frontier} subsets left unexplored)")


class NotSynchronizingError(ValidationError):
    """An operation requiring a synchronizing automaton got one that is not."""


class ConvergenceError(SynlabError):
    def __init__(self, message, residual):
        self.residual = residual
        super().__init__(f"{message} (residual {residual:.3e})")


class PropertyViolation(SynlabError):
    """A checked invariant failed; indicates a bug or a false claim."""
