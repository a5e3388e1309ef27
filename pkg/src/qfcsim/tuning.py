"""Counter-tuning of the phase-matching and noise-peak temperatures.

The conversion's phase-matching temperature and the pump-induced noise peaks
shift linearly with pump wavelength, at slopes of opposite sign. Detuning the
pump therefore separates the operating temperature from the noise structure;
this module predicts both temperatures and picks the pump wavelength that
minimizes the interpolated noise at the operating point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import OutOfRangeError, ValidationError

__all__ = [
    "TuningModel",
    "NoiseProfile",
    "predict_operating_points",
    "suggest_pump_detuning",
    "crossing_wavelength_nm",
    "DEFAULT_SPDC_SLOPE_C_PER_PM",
]

# Measured value; the theoretical slope (+0.03) can be passed explicitly.
DEFAULT_SPDC_SLOPE_C_PER_PM = 0.02


@dataclass(frozen=True)
class TuningModel:
    """Linear temperature-versus-wavelength model for both processes.

    Temperatures extrapolate from a reference wavelength as
    t = t_ref + slope * (lambda - lambda_ref) with the wavelength offset
    expressed in picometers (slopes are degrees Celsius per picometer).
    """

    lambda_ref_nm: float
    t_dfg_ref_c: float
    slope_dfg_c_per_pm: float
    t_spdc_ref_c: float
    slope_spdc_c_per_pm: float = DEFAULT_SPDC_SLOPE_C_PER_PM

    def __post_init__(self) -> None:
        if not (self.lambda_ref_nm > 0 and math.isfinite(self.lambda_ref_nm)):
            raise ValidationError(f"lambda_ref_nm must be positive, got {self.lambda_ref_nm}")
        for name in ("t_dfg_ref_c", "slope_dfg_c_per_pm", "t_spdc_ref_c", "slope_spdc_c_per_pm"):
            if not math.isfinite(getattr(self, name)):
                raise ValidationError(f"{name} must be finite")


@dataclass(frozen=True)
class NoiseProfile:
    """Noise counts sampled against waveguide temperature, sorted ascending."""

    samples: tuple[tuple[float, float], ...]

    def __post_init__(self) -> None:
        if len(self.samples) < 2:
            raise ValidationError(f"noise profile needs >= 2 samples, got {len(self.samples)}")
        temps = [t for t, _ in self.samples]
        if any(not math.isfinite(t) for t in temps) or any(
            not math.isfinite(c) for _, c in self.samples
        ):
            raise ValidationError("noise profile samples must be finite")
        if any(b <= a for a, b in zip(temps, temps[1:])):
            raise ValidationError("noise profile temperatures must be strictly increasing")

    @classmethod
    def from_lists(cls, temperatures_c, counts_hz) -> "NoiseProfile":
        if len(temperatures_c) != len(counts_hz):
            raise ValidationError("temperatures and counts must have equal length")
        return cls(tuple((float(t), float(c)) for t, c in zip(temperatures_c, counts_hz)))

    @property
    def temperatures_c(self) -> np.ndarray:
        return np.array([t for t, _ in self.samples])

    @property
    def counts_hz(self) -> np.ndarray:
        return np.array([c for _, c in self.samples])

    @property
    def support_c(self) -> tuple[float, float]:
        return (self.samples[0][0], self.samples[-1][0])


def predict_operating_points(model: TuningModel, lambda_pump_nm: float) -> tuple[float, float]:
    """Phase-matching and noise-peak temperatures at a pump wavelength."""
    offset_pm = (lambda_pump_nm - model.lambda_ref_nm) * 1000.0
    t_dfg = model.t_dfg_ref_c + model.slope_dfg_c_per_pm * offset_pm
    t_spdc = model.t_spdc_ref_c + model.slope_spdc_c_per_pm * offset_pm
    return (t_dfg, t_spdc)


def crossing_wavelength_nm(model: TuningModel) -> float:
    """Wavelength where the two predicted temperatures coincide.

    Defined only when the slopes differ; equal slopes never cross (or always
    coincide) and raise a validation error.
    """
    slope_gap = model.slope_dfg_c_per_pm - model.slope_spdc_c_per_pm
    if slope_gap == 0.0:
        raise ValidationError("slopes are equal; the predicted temperatures never cross")
    return model.lambda_ref_nm - (model.t_dfg_ref_c - model.t_spdc_ref_c) / (slope_gap * 1000.0)


def suggest_pump_detuning(
    model: TuningModel,
    profile: NoiseProfile,
    lambda_range_nm: tuple[float, float],
    grid_points: int,
) -> tuple[float, float]:
    """Pump wavelength in the range minimizing noise at the operating point.

    The noise structure rides the noise-peak temperature, so before
    interpolation the profile is translated by the noise-peak shift; the
    operating temperature is then looked up in the translated profile. Ties
    resolve to the smallest wavelength. Raises :class:`OutOfRangeError`
    naming the first wavelength whose operating temperature falls outside
    the translated profile's support.
    """
    if grid_points < 2:
        raise ValidationError(f"grid_points must be >= 2, got {grid_points}")
    lo, hi = float(lambda_range_nm[0]), float(lambda_range_nm[1])
    if not (math.isfinite(lo) and math.isfinite(hi)) or lo > hi:
        raise ValidationError(f"invalid wavelength range ({lo}, {hi})")

    temps = profile.temperatures_c
    counts = profile.counts_hz
    t_min, t_max = profile.support_c

    lambdas = np.linspace(lo, hi, grid_points)
    offsets_pm = (lambdas - model.lambda_ref_nm) * 1000.0
    t_dfg = model.t_dfg_ref_c + model.slope_dfg_c_per_pm * offsets_pm
    # Translating the profile by the noise-peak shift and sampling at t_dfg
    # equals sampling the original profile at t_dfg minus the shift.
    lookup = t_dfg - model.slope_spdc_c_per_pm * offsets_pm

    outside = (lookup < t_min) | (lookup > t_max)
    if np.any(outside):
        i = int(np.argmax(outside))
        raise OutOfRangeError(
            f"pump wavelength {lambdas[i]:.6g} nm maps to operating temperature "
            f"{lookup[i]:.6g} C outside the profile support [{t_min:.6g}, {t_max:.6g}] C"
        )

    noise = np.interp(lookup, temps, counts)
    best = int(np.argmin(noise))
    return (float(lambdas[best]), float(noise[best]))
