"""Exception types raised across the package."""


class CavityKitaevError(Exception):
    """Base class for every error raised by this package."""


class InvalidSpaceError(CavityKitaevError, ValueError):
    pass


class ShapeError(CavityKitaevError, ValueError):
    pass


class ContractViolation(CavityKitaevError, ValueError):
    """An input broke a documented precondition (e.g. non-Hermitian Hamiltonian)."""


class SolverError(CavityKitaevError, RuntimeError):
    """Eigensolver did not reach the requested residual tolerance."""

    def __init__(self, message, residuals=None):
        super().__init__(message)
        self.residuals = residuals


class IntegratorError(CavityKitaevError, RuntimeError):
    pass


class SingularityError(CavityKitaevError, ZeroDivisionError):
    """A closed-form expression would divide by a vanishing detuning or coupling."""


class InconsistentFrequenciesError(CavityKitaevError, ValueError):
    pass


class ConditionError(CavityKitaevError, ValueError):
    """Parameter conditions required by a reduction do not hold."""


class RegimeError(CavityKitaevError, RuntimeError):
    """A numerical extraction left the regime where it is meaningful."""


class CapacityError(CavityKitaevError, ValueError):
    pass


class UnsupportedError(CavityKitaevError, ValueError):
    pass


class ConfigError(CavityKitaevError, ValueError):
    """Invalid run configuration; message names the offending [section].key."""

    def __init__(self, message, location=None):
        if location:
            message = f"{location}: {message}"
        super().__init__(message)
        self.location = location


class SerializationError(CavityKitaevError, ValueError):
    pass
