"""Exception hierarchy shared by all modules.

The CLI maps these onto process exit codes: DomainError -> 2,
SeriesDivergenceError -> 3, UnsupportedRegimeError -> 4. Everything else is an
ordinary failure.
"""


class GflbdpError(Exception):
    """Base class for all library errors."""


class DomainError(GflbdpError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class SeriesDivergenceError(GflbdpError, ArithmeticError):
    """A series evaluation hit its term cap or lost all precision.

    Attributes
    ----------
    largest_term : float
        Magnitude of the largest term seen before giving up.
    terms_used : int
        Number of terms accumulated.
    """

    def __init__(self, msg, largest_term=0.0, terms_used=0):
        super().__init__(msg)
        self.largest_term = largest_term
        self.terms_used = terms_used


class InversionUnstableError(GflbdpError, ArithmeticError):
    """Gaver-Stehfest inversion looks unstable; retry with the Talbot contour."""


class QuadratureError(GflbdpError, ArithmeticError):
    """Adaptive quadrature failed to reach its tolerance."""

    def __init__(self, msg, achieved=float("nan")):
        super().__init__(msg)
        self.achieved = achieved


class UnsupportedRegimeError(GflbdpError):
    """The requested simulation regime is not supported (e.g. a beta scaling
    whose composed Laplace exponent fails verification)."""


class HorizonError(GflbdpError, RuntimeError):
    """A simulation exceeded its horizon or path-length cap."""


class InternalConsistencyError(GflbdpError, AssertionError):
    """Two internally computed quantities disagree beyond tolerance."""
