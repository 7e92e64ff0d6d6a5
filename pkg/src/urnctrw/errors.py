"""Exception and warning types raised across the toolkit."""


class UrnCtrwError(Exception):
    """Base class for toolkit errors."""


class InvalidParameterError(UrnCtrwError, ValueError):
    """Parameters violate the invariants of a diffusion, chain or law."""


class DomainError(UrnCtrwError, ValueError):
    """A state value lies outside the state space."""


class EmbeddingError(UrnCtrwError, ValueError):
    """The floor embedding of a starting point falls outside {0, ..., n}.

    Usually means ``n`` is too small for the requested starting point.
    """

    def __init__(self, message, state=None, n=None):
        super().__init__(message)
        self.state = state
        self.n = n


class PathExhaustedError(UrnCtrwError, IndexError):
    """A chain path is shorter than the index a time change asks for."""

    def __init__(self, message, required_length):
        super().__init__(message)
        self.required_length = required_length


class PathTooShortError(UrnCtrwError, ValueError):
    """A subordinator path does not reach past the requested time."""

    def __init__(self, message, deficit):
        super().__init__(message)
        self.deficit = deficit


class HorizonExceededError(UrnCtrwError, ValueError):
    """A renewal count was requested beyond the sampled horizon."""


class UnsupportedArgumentError(UrnCtrwError, ValueError):
    """Argument outside the validated range of a special function."""


class NumericalDegeneracyError(UrnCtrwError, ArithmeticError):
    """An orthonormal system lost orthonormality beyond tolerance."""


class InsufficientSamplingError(UrnCtrwError, ValueError):
    """Too few samples to evaluate a quadrature reliably."""


class EmptyResultError(UrnCtrwError, ValueError):
    """An empirical distribution was requested from no samples."""


class EnsembleError(UrnCtrwError):
    """One or more ensemble paths failed; ``failures`` maps path index to error."""

    def __init__(self, message, failures):
        super().__init__(message)
        self.failures = failures


class ConfigError(UrnCtrwError, ValueError):
    """Malformed or inconsistent experiment configuration."""

    def __init__(self, message, key=None):
        super().__init__(message)
        self.key = key


class TruncationWarning(UserWarning):
    """A truncated spectral series has not converged to the requested level."""
