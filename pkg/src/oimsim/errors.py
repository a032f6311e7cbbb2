"""Exception types raised across the simulator."""


class OimError(Exception):
    """Base class for simulator errors."""


class DimensionError(OimError, ValueError):
    """Operand shapes do not agree."""


class RankDeficient(OimError, ArithmeticError):
    """A matrix that must have full column rank does not.

    Under continuous fading this is a probability-zero event; the harness
    treats it as an aborted trial and redraws the block.
    """


class NotHermitian(OimError, ValueError):
    pass


class MissingBases(OimError, ValueError):
    """OIA-mode computation requested without interference bases."""


class InvalidWindow(OimError, ValueError):
    """Two-step scheduling window outside [S, N]."""


class DomainError(OimError, ValueError):
    """Argument outside the domain where a formula or bound is defined."""


class ConfigError(OimError, ValueError):
    """Invalid experiment configuration (CLI exit code 2)."""


class ResourceError(OimError, RuntimeError):
    """Experiment would exceed a configured resource cap (CLI exit code 3)."""
