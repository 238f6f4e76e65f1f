"""Exception hierarchy shared by the simulation modules."""


class PhysicsError(Exception):
    """Base for failures of the physical model (CLI exit status 1)."""


class DomainError(PhysicsError, ValueError):
    """An argument lies outside the domain of the operation."""


class ConfigError(ValueError):
    """A configuration file could not be parsed or resolved."""


class NoSteadyStateError(PhysicsError):
    pass


class DivergenceError(PhysicsError):
    """Resonant divergence of the intracavity photon number."""

    def __init__(self, message, u_at_min_detuning=None):
        super().__init__(message)
        self.u_at_min_detuning = u_at_min_detuning


class PoleError(PhysicsError):
    def __init__(self, message, omega=None):
        super().__init__(message)
        self.omega = omega


class ConvergenceError(PhysicsError):
    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class InstabilityError(PhysicsError):
    pass


class UndefinedContrastError(PhysicsError):
    pass


class OutOfRangeError(PhysicsError):
    pass


def annotate(exc: Exception, context: str) -> Exception:
    """Copy of ``exc`` (same type and attributes) with ``context`` prefixed."""
    new = type(exc).__new__(type(exc))
    Exception.__init__(new, f"{context}: {exc}")
    new.__dict__.update(exc.__dict__)
    return new
