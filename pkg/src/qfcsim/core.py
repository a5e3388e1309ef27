"""Shared physical types and the external-efficiency budget arithmetic.

All types are immutable value objects validated at construction; they are safe
to share across threads. Units follow :mod:`qfcsim.units`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import ValidationError

#: Relative tolerance applied to the photon-energy balance of a wavelength
#: triple: |1/l1 - 1/l2 - 1/l3| * l1 must stay below this.
ENERGY_BALANCE_RTOL = 1e-2

DEFAULT_WAVELENGTHS_NM = (393.0, 527.0, 1550.0)


def check_energy_conservation(wavelengths_nm: tuple[float, float, float]) -> float:
    """Photon-energy balance residual of a (signal, pump, converted) triple.

    For difference-frequency conversion the inverse wavelengths must satisfy
    1/l1 = 1/l2 + 1/l3. Returns |1/l1 - 1/l2 - 1/l3| in nm^-1; the caller
    decides what residual is acceptable.
    """
    l1, l2, l3 = wavelengths_nm
    if l1 <= 0 or l2 <= 0 or l3 <= 0:
        raise ValidationError(f"wavelengths must be positive, got {wavelengths_nm}")
    return abs(1.0 / l1 - 1.0 / l2 - 1.0 / l3)


@dataclass(frozen=True)
class WaveguideSpec:
    """Geometry and poling parameters of a quasi-phase-matched waveguide.

    Parameters
    ----------
    length_cm:
        Physical length L in cm.
    poling_period_um:
        Poling period in um (the sign-flip period of the nonlinearity).
    d_eff:
        Relative nonlinearity scale (dimensionless), defaults to 1.
    wavelengths_nm:
        (signal, pump, converted) wavelengths in nm; the triple must balance
        photon energy to within ``ENERGY_BALANCE_RTOL``.
    """

    length_cm: float
    poling_period_um: float
    d_eff: float = 1.0
    wavelengths_nm: tuple[float, float, float] = DEFAULT_WAVELENGTHS_NM

    def __post_init__(self):
        if self.length_cm <= 0:
            raise ValidationError(f"length_cm must be positive, got {self.length_cm}")
        if self.poling_period_um <= 0:
            raise ValidationError(
                f"poling_period_um must be positive, got {self.poling_period_um}"
            )
        residual = check_energy_conservation(self.wavelengths_nm)
        if residual * self.wavelengths_nm[0] >= ENERGY_BALANCE_RTOL:
            raise ValidationError(
                f"wavelength triple {self.wavelengths_nm} violates photon-energy "
                f"balance: residual {residual:.3g} nm^-1 exceeds the "
                f"{ENERGY_BALANCE_RTOL:g} relative gate"
            )

    @property
    def length_um(self) -> float:
        return self.length_cm * 1.0e4


@dataclass(frozen=True)
class LossSet:
    """Per-wave power attenuation coefficients in cm^-1.

    alpha1 attenuates the signal, alpha2 the pump, alpha3 the converted wave.
    """

    alpha1_per_cm: float
    alpha2_per_cm: float
    alpha3_per_cm: float

    def __post_init__(self):
        for name in ("alpha1_per_cm", "alpha2_per_cm", "alpha3_per_cm"):
            if getattr(self, name) < 0:
                raise ValidationError(f"{name} must be nonnegative, got {getattr(self, name)}")

    @property
    def delta_alpha_per_cm(self) -> float:
        """Combined low-conversion attenuation (a1 + a2 - a3) / 2."""
        return 0.5 * (self.alpha1_per_cm + self.alpha2_per_cm - self.alpha3_per_cm)


@dataclass(frozen=True)
class ThroughputBudget:
    """Multiplicative throughput factors of the conversion chain.

    ``detector_efficiency`` is stored for reporting but deliberately excluded
    from the external-efficiency product, which is defined at the fiber
    output, before detection.
    """

    t_waveguide: float
    t_collect: float
    t_filter: float
    detector_efficiency: float | None = None

    def __post_init__(self):
        for name in ("t_waveguide", "t_collect", "t_filter"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValidationError(f"{name} must lie in [0, 1], got {value}")
        if self.detector_efficiency is not None and not 0.0 <= self.detector_efficiency <= 1.0:
            raise ValidationError(
                f"detector_efficiency must lie in [0, 1], got {self.detector_efficiency}"
            )


def external_efficiency(budget: ThroughputBudget, eta_int: float) -> float:
    """End-to-end external conversion efficiency.

    The product t_waveguide * eta_int * t_collect * t_filter. The internal
    efficiency is output-referenced and may exceed 1 (up to 1.5) when the
    input wave is attenuated more strongly than the converted wave.
    """
    if not 0.0 <= eta_int <= 1.5:
        raise ValidationError(f"eta_int must lie in [0, 1.5], got {eta_int}")
    return budget.t_waveguide * eta_int * budget.t_collect * budget.t_filter
