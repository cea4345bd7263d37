"""Exception hierarchy shared by every tfham module."""


class TFHamError(Exception):
    """Base class for all errors raised by tfham."""


class ParameterMismatchError(TFHamError, ValueError):
    """Two series built on different basis parameters or numeric modes were combined."""


class BasisEscapeError(TFHamError, ValueError):
    """An operation would leave the decaying basis, e.g. ``x * constant``."""


class ResonanceError(TFHamError, ArithmeticError):
    """A forcing term has its operator preimage in the kernel."""

    def __init__(self, exponent, message=None):
        self.exponent = exponent
        super().__init__(message or f"resonant exponent {exponent}")


class SequencingError(TFHamError, ValueError):
    """A recursion step was requested before its lower orders exist."""


class DomainError(TFHamError, ValueError):
    """An argument lies outside the domain of the operation."""


class BranchError(DomainError):
    """The series is non-positive where the square root of u**3/x is needed."""


class DegeneracyError(TFHamError, ArithmeticError):
    """A Pade denominator system is singular."""


class BracketError(TFHamError, ValueError):
    """Both shooting bracket endpoints classify the same way."""


class IntegrationError(TFHamError, RuntimeError):
    """The ODE integrator failed (step-size underflow or similar)."""

    def __init__(self, x, message):
        self.x = x
        super().__init__(f"{message} (at x={x!r})")


class EngineError(TFHamError, RuntimeError):
    """Wraps an engine failure together with the order index where it happened."""

    def __init__(self, order, cause):
        self.order = order
        self.cause = cause
        super().__init__(f"order {order}: {cause}")
