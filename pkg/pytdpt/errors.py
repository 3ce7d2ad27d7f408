# pytdpt/errors.py
"""Exception hierarchy for pytdpt.

Every error also derives from the builtin exception a caller would
naturally catch (``ValueError`` for bad input, ``RuntimeError`` for guards
that trip during execution), so code written against the builtins keeps
working.
"""


class PytdptError(Exception):
    """Base class for all errors raised by pytdpt."""


class ConfigurationError(PytdptError, ValueError):
    """Invalid grid, pulse, scenario or config-file parameters."""


class ResolutionError(ConfigurationError):
    """A wave packet is too narrow for the spatial grid."""


class GridMismatchError(PytdptError, ValueError):
    """Operands live on different grids or time series do not align."""


class DomainError(PytdptError, ValueError):
    """Arguments fall outside the domain where a formula is defined."""


class CapacityError(PytdptError, RuntimeError):
    """A combinatorial enumeration would exceed its hard size limit."""


class NumericalConsistencyError(PytdptError, ArithmeticError):
    """A quantity that must be real came out with a significant imaginary part."""


class PhysicsGuardError(PytdptError, RuntimeError):
    """The propagated packet reached the edge of the simulation box."""
