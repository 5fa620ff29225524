"""Exception hierarchy shared by every module of the package."""


class NematicError(Exception):
    """Base class for all errors raised by nematic2d."""


class NonFinite(NematicError):
    """A coefficient or field value is NaN or infinite."""


class InvalidCoefficients(NematicError):
    """A coefficient set failed validation."""


class GridMismatch(NematicError):
    """Fields or states do not live on the same grid."""


class UnnormalizedDirector(NematicError):
    """A director field violates the unit-norm constraint."""


class ConsistencyFailure(NematicError):
    """Two independent evaluations of the same quantity disagree."""


class ConstraintDrift(NematicError):
    """The director left the unit sphere by more than the step guard allows."""


class UnknownGenerator(NematicError):
    """An initial-data generator name is not registered."""


class ConfigError(NematicError):
    """Base class for run-configuration problems (CLI exit code 2)."""


class ParseError(ConfigError):
    """The configuration text is not valid JSON."""


class ValidationError(ConfigError):
    """The configuration parsed but violates one or more constraints.

    ``errors`` holds ``(path, message)`` pairs, all of them, not only the first.
    """

    def __init__(self, errors):
        self.errors = list(errors)
        lines = [f"{path}: {msg}" for path, msg in self.errors]
        super().__init__("invalid configuration:\n  " + "\n  ".join(lines))
