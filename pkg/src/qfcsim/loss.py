"""Propagation-loss extraction from cut-back series and facet-fringe spectra.

Two independent measurement reductions: an ordinary least-squares fit of
log-transmission against sample length (cut-back method), and inversion of
the Fabry-Perot fringe contrast produced by the two facet reflections. The
fringe contrast b = T_min/T_max relates to the facet reflectivity R and the
single-pass loss through R_bar = R * e^{-alpha*L} via
b = ((1 - R_bar)/(1 + R_bar))^2, giving alpha = ln(R/R_bar)/L.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import (
    ContrastExceedsReflectionError,
    DegenerateDesignError,
    InsufficientFringesError,
    ValidationError,
)
from .fitting import fit_linear

__all__ = [
    "CutbackDataset",
    "CutbackResult",
    "FpMeasurement",
    "cutback_fit",
    "find_fringe_extrema",
    "fp_contrast",
    "fp_loss",
    "fp_contrast_from_loss",
    "fp_loss_from_measurement",
    "facet_reflectivity",
]

_EXTREMA_AVERAGED = 5
_MIN_ALTERNATING_EXTREMA = 7


@dataclass(frozen=True)
class CutbackDataset:
    """Transmission measured on successively shortened samples."""

    points: tuple[tuple[float, float], ...]

    def __post_init__(self) -> None:
        if len(self.points) < 2:
            raise ValidationError(f"cut-back needs >= 2 points, got {len(self.points)}")
        for length, transmission in self.points:
            if not (length > 0 and math.isfinite(length)):
                raise ValidationError(f"sample length must be positive, got {length}")
            if not (0 < transmission <= 1):
                raise ValidationError(
                    f"transmission must be in (0, 1], got {transmission}"
                )
        lengths = {length for length, _ in self.points}
        if len(lengths) < 2:
            raise DegenerateDesignError(
                "cut-back needs at least 2 distinct sample lengths"
            )

    @classmethod
    def from_lists(cls, lengths_cm, transmissions) -> "CutbackDataset":
        if len(lengths_cm) != len(transmissions):
            raise ValidationError("lengths and transmissions must have equal length")
        return cls(tuple((float(l), float(t)) for l, t in zip(lengths_cm, transmissions)))


@dataclass(frozen=True)
class CutbackResult:
    """Loss coefficient from the cut-back regression.

    ``stderr_per_cm`` is None with exactly two points (the line interpolates
    and leaves no residual degrees of freedom).
    """

    alpha_per_cm: float
    stderr_per_cm: float | None
    r2: float


def cutback_fit(data: CutbackDataset) -> CutbackResult:
    """Least-squares slope of ln(transmission) versus length; loss = -slope."""
    lengths = [length for length, _ in data.points]
    log_t = [math.log(t) for _, t in data.points]
    result = fit_linear(lengths, log_t)
    slope = result.param("slope")
    return CutbackResult(
        alpha_per_cm=-slope.value,
        stderr_per_cm=slope.stderr,
        r2=result.r2,
    )


def find_fringe_extrema(
    spectrum,
) -> tuple[list[tuple[float, float]], list[tuple[float, float]]]:
    """Alternating local maxima and minima of a fringe spectrum.

    Points are sorted by frequency; runs of equal transmission (plateaus)
    collapse to their central point before neighbor comparison, so a flat-top
    fringe still counts as a single extremum. Endpoints are never extrema.
    Returns (maxima, minima) as (frequency, transmission) lists.
    """
    pts = sorted((float(f), float(t)) for f, t in spectrum)
    if len(pts) < 3:
        return ([], [])
    for _, t in pts:
        if not (t >= 0 and math.isfinite(t)):
            raise ValidationError(f"transmission must be finite and >= 0, got {t}")

    # Collapse equal-value plateaus to their middle sample.
    collapsed: list[tuple[float, float]] = []
    i = 0
    while i < len(pts):
        j = i
        while j + 1 < len(pts) and pts[j + 1][1] == pts[i][1]:
            j += 1
        collapsed.append(pts[(i + j) // 2])
        i = j + 1

    maxima: list[tuple[float, float]] = []
    minima: list[tuple[float, float]] = []
    for idx in range(1, len(collapsed) - 1):
        prev_t = collapsed[idx - 1][1]
        this = collapsed[idx]
        next_t = collapsed[idx + 1][1]
        if this[1] > prev_t and this[1] > next_t:
            maxima.append(this)
        elif this[1] < prev_t and this[1] < next_t:
            minima.append(this)
    return (maxima, minima)


def fp_contrast(spectrum) -> float:
    """Fringe contrast b = T_min/T_max from a transmission spectrum.

    The top few maxima and bottom few minima (up to 5 each) are averaged to
    suppress single-point outliers. Raises
    :class:`InsufficientFringesError` unless at least two maxima and two
    minima are found.
    """
    maxima, minima = find_fringe_extrema(spectrum)
    if len(maxima) < 2 or len(minima) < 2:
        raise InsufficientFringesError(
            f"need >= 2 maxima and >= 2 minima to measure contrast, "
            f"found {len(maxima)} and {len(minima)}"
        )
    top = sorted((t for _, t in maxima), reverse=True)[: _EXTREMA_AVERAGED]
    bottom = sorted(t for _, t in minima)[: _EXTREMA_AVERAGED]
    t_max = sum(top) / len(top)
    t_min = sum(bottom) / len(bottom)
    if t_max <= 0:
        raise ValidationError("fringe maxima are nonpositive; contrast undefined")
    return t_min / t_max


@dataclass(frozen=True)
class FpMeasurement:
    """Facet-fringe measurement: a spectrum or a precomputed contrast.

    Exactly one of ``spectrum`` and ``contrast`` must be given. A spectrum
    must show at least three full oscillation periods (seven alternating
    extrema) to pin the contrast reliably.
    """

    refractive_index: float
    length_cm: float
    spectrum: tuple[tuple[float, float], ...] | None = None
    contrast: float | None = None

    def __post_init__(self) -> None:
        if not (self.refractive_index > 1 and math.isfinite(self.refractive_index)):
            raise ValidationError(
                f"refractive index must exceed 1, got {self.refractive_index}"
            )
        if not (self.length_cm > 0 and math.isfinite(self.length_cm)):
            raise ValidationError(f"length_cm must be positive, got {self.length_cm}")
        if (self.spectrum is None) == (self.contrast is None):
            raise ValidationError("provide exactly one of spectrum and contrast")
        if self.contrast is not None and not (0 < self.contrast < 1):
            raise ValidationError(f"contrast must be in (0, 1), got {self.contrast}")
        if self.spectrum is not None:
            maxima, minima = find_fringe_extrema(self.spectrum)
            total = len(maxima) + len(minima)
            if total < _MIN_ALTERNATING_EXTREMA:
                raise InsufficientFringesError(
                    f"spectrum shows {total} alternating extrema; "
                    f"need >= {_MIN_ALTERNATING_EXTREMA} (three oscillation periods)"
                )

    def fringe_contrast(self) -> float:
        if self.contrast is not None:
            return self.contrast
        return fp_contrast(self.spectrum)


def facet_reflectivity(refractive_index: float) -> float:
    """Normal-incidence Fresnel reflectivity ((n-1)/(n+1))^2 of one facet."""
    if refractive_index <= 1:
        raise ValidationError(f"refractive index must exceed 1, got {refractive_index}")
    return ((refractive_index - 1.0) / (refractive_index + 1.0)) ** 2


def fp_loss(b: float, n: float, length_cm: float) -> float:
    """Propagation loss from fringe contrast, alpha = ln(R/R_bar)/L.

    R_bar = (1 - sqrt(b))/(1 + sqrt(b)) is the loss-damped reflectivity
    implied by the contrast. A contrast so weak that R_bar exceeds the facet
    reflectivity R would imply negative loss and raises
    :class:`ContrastExceedsReflectionError` carrying the would-be value.
    At the lossless-cavity limit R_bar = R the loss is exactly zero;
    rounding-level negatives within 1e-12 of zero snap to 0.0.
    """
    if not (0 < b < 1):
        raise ValidationError(f"contrast must be in (0, 1), got {b}")
    if length_cm <= 0:
        raise ValidationError(f"length_cm must be positive, got {length_cm}")
    reflectivity = facet_reflectivity(n)
    damped = (1.0 - math.sqrt(b)) / (1.0 + math.sqrt(b))
    alpha = math.log(reflectivity / damped) / length_cm
    if alpha < 0.0:
        if alpha >= -1e-12:
            return 0.0
        raise ContrastExceedsReflectionError(would_be_alpha_per_cm=alpha)
    return alpha


def fp_contrast_from_loss(alpha_per_cm: float, n: float, length_cm: float) -> float:
    """Forward fringe model: contrast produced by a given propagation loss."""
    if alpha_per_cm < 0:
        raise ValidationError(f"loss must be >= 0, got {alpha_per_cm}")
    if length_cm <= 0:
        raise ValidationError(f"length_cm must be positive, got {length_cm}")
    damped = facet_reflectivity(n) * math.exp(-alpha_per_cm * length_cm)
    return ((1.0 - damped) / (1.0 + damped)) ** 2


def fp_loss_from_measurement(measurement: FpMeasurement) -> float:
    """Propagation loss from a fringe measurement (spectrum or contrast)."""
    return fp_loss(
        measurement.fringe_contrast(),
        measurement.refractive_index,
        measurement.length_cm,
    )
