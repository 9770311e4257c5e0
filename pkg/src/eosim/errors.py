"""Exception types shared across the simulator."""


class EoSimError(Exception):
    """Base class for all simulator errors."""


class DimensionError(EoSimError, ValueError):
    """Operator or state dimensions do not match the declared space."""


class ConfigurationError(EoSimError, ValueError):
    """Physically or numerically invalid parameter set."""


class IntegrationError(EoSimError, RuntimeError):
    """The integrator violated a hard numerical-health bound."""


class NumericalHealthError(EoSimError, RuntimeError):
    """A state or observable left its allowed numerical envelope."""


class ConditionalStateError(EoSimError, RuntimeError):
    """Conditional state requested for an event of zero probability."""
