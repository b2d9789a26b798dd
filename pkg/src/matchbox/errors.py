"""Exception hierarchy shared by all modules."""


class MatchboxError(Exception):
    pass


class ValidationError(MatchboxError, ValueError):
    """An economy or configuration field violates its invariant."""

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field


class InfeasibleError(MatchboxError, ValueError):
    """A transition (x, x') lies outside the transition possibility set."""


class DomainError(MatchboxError, ValueError):
    """A discount factor argument lies outside [0, 1/theta]."""


class BracketError(MatchboxError, ArithmeticError):
    """Root bracket does not show the expected sign change."""


class EnumerationCapError(MatchboxError, RuntimeError):
    """Too many bifurcation thresholds were needed to place delta."""


class UnsupportedRegimeError(MatchboxError):
    """No closed-form characterization exists for this economy."""


class RegimeError(MatchboxError):
    """An operation was called for an economy in the wrong regime."""


class ConvergenceError(MatchboxError, RuntimeError):
    """Value iteration hit its iteration cap before converging."""
