"""Error taxonomy shared across the package.

Exceptions are deliberately fine-grained so callers (and the CLI exit-code
mapping) can tell a modelling problem apart from a usage problem.
"""


class MusielakError(Exception):
    """Base class for everything raised deliberately by this package."""


class ConfigError(MusielakError, ValueError):
    """Malformed declarative config: names the offending key when possible."""


class FieldDomainError(MusielakError, ValueError):
    """A spatial field was evaluated outside its declared range of validity."""


class NormalizationError(MusielakError, ValueError):
    """A calibration step hit a degenerate value (inverse-at-one 0 or inf)."""


class GrowthConditionError(MusielakError, ArithmeticError):
    """An integrability condition at 0 fails, so a transform is undefined."""


class KernelError(MusielakError, ArithmeticError):
    """A kernel-defining integral diverges at 0 for the supplied function."""


class NoFiniteNormError(MusielakError, ArithmeticError):
    """No finite scaling parameter brings the modular at or below one."""
