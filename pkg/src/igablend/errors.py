"""Exception hierarchy shared by all igablend modules."""


class IgaError(Exception):
    """Base class for all library errors."""


class InvalidParameter(IgaError, ValueError):
    """An argument is outside its admissible range."""


class DomainError(IgaError, ValueError):
    """An evaluation point lies outside the parametric domain."""


class UnsupportedError(IgaError):
    """The requested computation is not supported in the chosen mode."""


class UnsafeRuleError(IgaError):
    """A stiffness rule under-integrates and the caller did not opt in."""


class NumericalError(IgaError):
    """A numerical procedure failed (definiteness, root finding, ...)."""


class DefinitenessError(NumericalError):
    """A matrix expected to be positive definite is not.

    ``pivot`` is the zero-based index of the first non-positive pivot
    of the Cholesky factorisation.
    """

    def __init__(self, message, pivot=None):
        super().__init__(message)
        self.pivot = pivot


class DegenerateSymbolError(NumericalError):
    """A stencil symbol loses positivity or consistency."""


class OutOfBandError(NumericalError):
    """No root of the dispersion relation exists in (0, pi)."""


class NoSolutionError(NumericalError):
    """An optimisation problem has no (rational) solution."""
