"""Exception hierarchy shared by all modules and mapped to CLI exit codes."""


class BracketPoolError(Exception):
    """Base class for every error raised by this package."""


class StructuralError(BracketPoolError, ValueError):
    """Malformed input shape: bad team count, wrong vector length, empty sets."""


class InfeasibleBracketError(BracketPoolError, ValueError):
    """A bracket violates one of the feasibility conditions."""

    def __init__(self, violations):
        self.violations = list(violations)
        msg = "; ".join(str(v) for v in self.violations) or "infeasible bracket"
        super().__init__(msg)


class ProbabilityError(BracketPoolError, ValueError):
    """A probability table fails its invariants."""


class GuardRefusal(BracketPoolError):
    """A computation was refused because it would exceed a size or budget guard."""


class InfeasibleConstraintsError(BracketPoolError):
    """A diversification constraint system admits no bracket."""

    def __init__(self, message, families=()):
        self.families = tuple(families)
        super().__init__(message)
