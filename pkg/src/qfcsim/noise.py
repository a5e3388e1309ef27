"""Pump-induced noise models and the efficiency-to-noise ratio curve.

The generated-noise rate is linear in the local pump power. A photon created
at depth u from the output facet either decays (rate ``alpha_dfg_per_cm``) or
is converted away with the sin^2 conversion probability accumulated over the
remaining length; the pump itself is attenuated along the guide. Two axis
conventions are supported for the pump factor:

``printed``
    The pump factor grows toward the input facet, e^{+alpha_pump * u}; the
    power argument is referenced to the output facet.
``attenuating``
    The pump factor decays from the input facet, e^{-alpha_pump * x} with
    x = L - u; the power argument is referenced to the input facet.

The two are related by an exact relabeling of the power axis:
noise_attenuating(P) = noise_printed(P * e^{-alpha_pump * L}).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .cme import CmeParams, internal_efficiency
from .core import ThroughputBudget, external_efficiency
from .errors import QuadratureError, ValidationError

__all__ = [
    "NoiseParams",
    "EnrPoint",
    "EnrCurve",
    "noise_lossless",
    "noise_lossy",
    "enr_curve",
]

QUADRATURE_RTOL = 1e-9
MAX_PANEL_DOUBLINGS = 14
_GL_ORDER = 16
SIGN_CONVENTIONS = ("printed", "attenuating")


@dataclass(frozen=True)
class NoiseParams:
    """Coefficients of the pump-induced noise model.

    ``a_hz_per_w_per_cm`` is the linear generation coefficient, multiplied by
    the local pump power and integrated over the guide. ``eta_int_max`` caps
    the conversion probability of a generated photon. The loss rates are the
    pump attenuation and the decay rate of the generated (converted-band)
    photons.
    """

    a_hz_per_w_per_cm: float
    alpha_pump_per_cm: float
    alpha_dfg_per_cm: float
    eta_nor: float
    eta_int_max: float
    length_cm: float
    sign_convention: str = "printed"

    def __post_init__(self) -> None:
        nonneg = {
            "a_hz_per_w_per_cm": self.a_hz_per_w_per_cm,
            "alpha_pump_per_cm": self.alpha_pump_per_cm,
            "alpha_dfg_per_cm": self.alpha_dfg_per_cm,
            "eta_nor": self.eta_nor,
            "eta_int_max": self.eta_int_max,
        }
        bad = [name for name, v in nonneg.items() if not (v >= 0 and math.isfinite(v))]
        if bad:
            raise ValidationError(f"noise parameters must be finite and >= 0: {', '.join(bad)}")
        if self.eta_int_max > 1:
            raise ValidationError(f"eta_int_max must be <= 1, got {self.eta_int_max}")
        if not (self.length_cm > 0 and math.isfinite(self.length_cm)):
            raise ValidationError(f"length_cm must be positive, got {self.length_cm}")
        if self.sign_convention not in SIGN_CONVENTIONS:
            raise ValidationError(
                f"sign_convention must be one of {SIGN_CONVENTIONS}, got {self.sign_convention!r}"
            )


def noise_lossless(p_w: float, params: NoiseParams) -> float:
    """Closed-form noise rate with both loss rates set to zero.

    N = a * P * [L - eta_int_max * (L/2 - sin(2kL)/(4k))], k = sqrt(eta_nor*P).
    The bracket's small-argument limit is used when 2kL < 1e-4 to avoid the
    0/0 form at P = 0.
    """
    if p_w < 0:
        raise ValidationError(f"pump power must be >= 0, got {p_w}")
    length = params.length_cm
    k = math.sqrt(params.eta_nor * p_w)
    x = 2.0 * k * length
    if x < 1e-4:
        converted = (k * length) ** 2 * length / 3.0 - k**4 * length**5 / 15.0
    else:
        converted = length / 2.0 - math.sin(x) / (4.0 * k)
    return params.a_hz_per_w_per_cm * p_w * (length - params.eta_int_max * converted)


@lru_cache(maxsize=1)
def _gl_nodes() -> tuple[np.ndarray, np.ndarray]:
    nodes, weights = np.polynomial.legendre.leggauss(_GL_ORDER)
    return nodes, weights


def _integrand(u: np.ndarray, p_w: float, params: NoiseParams) -> np.ndarray:
    """Noise density at depth u from the output facet, per unit a*P."""
    if params.sign_convention == "printed":
        pump_factor = np.exp(params.alpha_pump_per_cm * u)
    else:
        pump_factor = np.exp(-params.alpha_pump_per_cm * (params.length_cm - u))
    local_k = np.sqrt(params.eta_nor * p_w * pump_factor)
    survives = np.exp(-params.alpha_dfg_per_cm * u)
    converted = params.eta_int_max * np.sin(u * local_k) ** 2
    return pump_factor * (survives - converted)


def _composite_gl(p_w: float, params: NoiseParams, panels: int) -> float:
    """Fixed-panel-count composite Gauss-Legendre estimate of the depth integral."""
    nodes, weights = _gl_nodes()
    edges = np.linspace(0.0, params.length_cm, panels + 1)
    half = 0.5 * (edges[1:] - edges[:-1])
    mid = 0.5 * (edges[1:] + edges[:-1])
    u = mid[:, None] + half[:, None] * nodes[None, :]
    values = _integrand(u, p_w, params)
    return float(np.sum(half[:, None] * weights[None, :] * values))


def initial_panel_count(p_w: float, params: NoiseParams) -> int:
    """Panel count keeping panels at or below a quarter local sin^2 period.

    The oscillation is fastest where the pump factor is largest, so the
    worst-case wavenumber sets a uniform panel width.
    """
    if params.sign_convention == "printed":
        peak_factor = math.exp(params.alpha_pump_per_cm * params.length_cm)
    else:
        peak_factor = 1.0
    k_max = math.sqrt(params.eta_nor * p_w * peak_factor)
    return max(8, math.ceil(4.0 * k_max * params.length_cm / math.pi))


def noise_lossy(p_w: float, params: NoiseParams, initial_panels: int | None = None) -> float:
    """Loss-corrected noise rate by adaptive composite quadrature.

    The panel count starts at a quarter of the fastest local oscillation
    period and doubles until two successive estimates agree to 1e-9 relative.
    Raises :class:`QuadratureError` carrying the partial estimate if the
    doubling budget is exhausted.
    """
    if p_w < 0:
        raise ValidationError(f"pump power must be >= 0, got {p_w}")
    if p_w == 0.0:
        return 0.0
    panels = initial_panels if initial_panels is not None else initial_panel_count(p_w, params)
    if panels < 1:
        raise ValidationError(f"initial_panels must be >= 1, got {panels}")
    scale = params.a_hz_per_w_per_cm * p_w
    estimate = _composite_gl(p_w, params, panels)
    rel = math.inf
    for _ in range(MAX_PANEL_DOUBLINGS):
        panels *= 2
        refined = _composite_gl(p_w, params, panels)
        rel = abs(refined - estimate) / max(abs(refined), 1e-300)
        if rel <= QUADRATURE_RTOL:
            return scale * refined
        estimate = refined
    raise QuadratureError(partial_estimate=scale * estimate, rel_change=rel)


@dataclass(frozen=True)
class EnrPoint:
    """One sweep point: pump power, external efficiency, noise, and their ratio."""

    p_w: float
    eta_ext: float
    noise_hz: float
    enr: float | None


@dataclass(frozen=True)
class EnrCurve:
    """Efficiency-to-noise sweep with the locations of both maxima.

    ``argmax_enr_w`` is None when no sweep point has a defined ratio (noise
    is zero wherever the pump power is zero).
    """

    points: tuple[EnrPoint, ...]
    argmax_eta_ext_index: int
    argmax_eta_ext_w: float
    argmax_enr_index: int | None
    argmax_enr_w: float | None


def enr_curve(
    p_sweep_w,
    noise_params: NoiseParams,
    cme_params: CmeParams,
    budget: ThroughputBudget,
) -> EnrCurve:
    """Sweep output-referenced pump power, pairing efficiency with noise.

    For each power the integrator supplies the internal efficiency (the pump
    launched at the input is the swept output-referenced value scaled back up
    by the pump attenuation), the budget converts it to external efficiency,
    and the noise model supplies the rate. The ratio is absent (None) where
    the noise rate is exactly zero.
    """
    powers = [float(p) for p in p_sweep_w]
    if not powers:
        raise ValidationError("power sweep must be nonempty")
    if any(p < 0 for p in powers):
        raise ValidationError("power sweep values must be >= 0")

    p1_in, p2_in = cme_params.input_powers_w
    signal_ratio = p1_in / p2_in
    alpha2 = cme_params.losses.alpha2_per_cm
    out_factor = math.exp(-alpha2 * cme_params.length_cm)

    points = []
    for p_out in powers:
        if p_out == 0.0:
            eta_int = 0.0
        else:
            launched = p_out / out_factor
            point_params = CmeParams(
                eta_nor=cme_params.eta_nor,
                losses=cme_params.losses,
                length_cm=cme_params.length_cm,
                input_powers_w=(signal_ratio * launched, launched),
                wavelengths_nm=cme_params.wavelengths_nm,
            )
            eta_int = internal_efficiency(point_params)
        eta_ext = external_efficiency(budget, eta_int)
        noise_hz = noise_lossy(p_out, noise_params)
        enr = eta_ext / noise_hz if noise_hz != 0.0 else None
        points.append(EnrPoint(p_w=p_out, eta_ext=eta_ext, noise_hz=noise_hz, enr=enr))

    i_eta = max(range(len(points)), key=lambda i: points[i].eta_ext)
    defined = [i for i in range(len(points)) if points[i].enr is not None]
    if defined:
        i_enr = max(defined, key=lambda i: points[i].enr)
        argmax_enr_w = points[i_enr].p_w
    else:
        i_enr = None
        argmax_enr_w = None
    return EnrCurve(
        points=tuple(points),
        argmax_eta_ext_index=i_eta,
        argmax_eta_ext_w=points[i_eta].p_w,
        argmax_enr_index=i_enr,
        argmax_enr_w=argmax_enr_w,
    )
