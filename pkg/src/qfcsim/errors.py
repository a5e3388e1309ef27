"""Exception hierarchy shared by the library, the service, and the CLI.

Two broad families matter to callers: input problems (``ValidationError`` and
subclasses; CLI exit code 2, HTTP 422 with ``type``) and numerical failures
(``NumericalError`` and subclasses; CLI exit code 3, HTTP 422 with ``type``).
"""

from __future__ import annotations


class QfcsimError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(QfcsimError):
    """Inputs violate a documented precondition or invariant."""


class DataFormatError(ValidationError):
    """A tabular input file is malformed.

    ``problems`` holds one human-readable entry per offending line/column so a
    single pass reports everything wrong with the file.
    """

    def __init__(self, source: str, problems: list[str]):
        self.source = source
        self.problems = list(problems)
        joined = "; ".join(self.problems)
        super().__init__(f"{source}: {joined}")


class OutOfRangeError(ValidationError):
    """A requested evaluation point falls outside the supported data range."""


class DegenerateDesignError(ValidationError):
    """A fit cannot be posed: the design matrix carries no information."""


class InsufficientFringesError(ValidationError):
    """A spectrum does not show enough fringe extrema to measure contrast."""


class ContrastExceedsReflectionError(ValidationError):
    """Fringe contrast implies a negative propagation loss.

    The contrast is higher than a lossless cavity with the given facet
    reflectivity could produce. ``would_be_alpha_per_cm`` carries the
    (negative) value the inversion would have returned.
    """

    def __init__(self, would_be_alpha_per_cm: float):
        self.would_be_alpha_per_cm = float(would_be_alpha_per_cm)
        super().__init__(
            "contrast exceeds facet-reflection limit "
            f"(would imply alpha = {would_be_alpha_per_cm:.6g} /cm)"
        )


class NumericalError(QfcsimError):
    """A numerical procedure failed to meet its convergence contract."""


class IntegrationError(NumericalError):
    """Step-halving refinement of the field integrator did not converge.

    Carries the endpoint photon fluxes of the last two refinement levels so
    the caller can judge how far apart they still are.
    """

    def __init__(self, last_two_endpoints: tuple[tuple[float, ...], tuple[float, ...]]):
        self.last_two_endpoints = last_two_endpoints
        prev, last = last_two_endpoints
        super().__init__(
            "integrator did not converge after 20 step-halving refinements; "
            f"last two endpoint fluxes {prev} vs {last}"
        )


class QuadratureError(NumericalError):
    """Adaptive quadrature did not reach the requested relative accuracy.

    ``partial_estimate`` is the best value obtained before giving up.
    """

    def __init__(self, partial_estimate: float, rel_change: float):
        self.partial_estimate = float(partial_estimate)
        self.rel_change = float(rel_change)
        super().__init__(
            f"quadrature stalled at relative change {rel_change:.3g} "
            f"(partial estimate {partial_estimate!r})"
        )


class RankDeficiencyError(NumericalError):
    """The least-squares normal equations are singular at the starting point."""
