"""Unit conventions and the fixed conversions between user-facing units.

Internal convention, used by every computational module:

* lengths in cm
* powers in W
* attenuation coefficients in cm^-1 (power attenuation)
* normalized conversion efficiency in W^-1 cm^-2
* probabilities, efficiencies, transmissions as dimensionless fractions

User-facing layers (CLI, service) speak mm, um, mW, and %/(W cm^2) and
convert exactly once at the boundary with the helpers below.
"""

from __future__ import annotations

import math

CM_PER_MM = 0.1
UM_PER_CM = 1.0e4
PM_PER_NM = 1.0e3
W_PER_MW = 1.0e-3


def mm_to_cm(value_mm: float) -> float:
    return value_mm * CM_PER_MM


def cm_to_mm(value_cm: float) -> float:
    return value_cm / CM_PER_MM


def um_to_cm(value_um: float) -> float:
    return value_um / UM_PER_CM


def cm_to_um(value_cm: float) -> float:
    return value_cm * UM_PER_CM


def mw_to_w(value_mw: float) -> float:
    return value_mw * W_PER_MW


def w_to_mw(value_w: float) -> float:
    return value_w / W_PER_MW


def nm_to_pm(value_nm: float) -> float:
    return value_nm * PM_PER_NM


def percent_per_w_cm2_to_internal(value: float) -> float:
    """Convert a normalized efficiency quoted in %/(W cm^2) to W^-1 cm^-2."""
    return value / 100.0


def internal_to_percent_per_w_cm2(value: float) -> float:
    return value * 100.0


def launched_to_output_power(p_launched_w: float, alpha_per_cm: float, length_cm: float) -> float:
    """Pump power at the output facet given the launched power."""
    return p_launched_w * math.exp(-alpha_per_cm * length_cm)


def output_to_launched_power(p_out_w: float, alpha_per_cm: float, length_cm: float) -> float:
    """Launched pump power required for a given output-facet power."""
    return p_out_w * math.exp(alpha_per_cm * length_cm)
