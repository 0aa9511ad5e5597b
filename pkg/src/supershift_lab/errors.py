"""Exception types shared across the library."""


class SupershiftError(Exception):
    """Base class for all library-specific failures."""


class EvaluationOverflow(SupershiftError):
    """An intermediate exponential left the representable double range."""


class DomainMarginError(SupershiftError):
    """An evaluation point came closer to an excluded pole than allowed."""


class PanelExhausted(SupershiftError):
    """Adaptive quadrature hit the panel budget before reaching tolerance.

    Carries the best value and error estimate obtained so far.
    """

    def __init__(self, message, value=None, err_estimate=None, panels_used=0):
        super().__init__(message)
        self.value = value
        self.err_estimate = err_estimate
        self.panels_used = panels_used


class HorizonExceeded(SupershiftError):
    """A time outside the kernel's validity interval was requested."""


class PrecisionExhausted(SupershiftError):
    """The extended-precision budget cannot absorb the cancellation."""
