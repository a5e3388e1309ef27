"""Request and response bodies of the HTTP service.

Fields carry user-facing units, spelled out in the field names: lengths in
mm, positions and periods in um, pump powers in mW, normalized efficiency in
percent per (W cm^2), losses in 1/cm, temperatures in degrees Celsius,
wavelengths in nm. Conversion to the library's internal units happens once,
in the route handlers.
"""

from __future__ import annotations

from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, model_validator


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


class DefectPointBody(_Strict):
    position_um: float = Field(ge=0)
    width_um: float = Field(ge=0)


class BudgetBody(_Strict):
    """Throughput factors of the external-efficiency budget."""

    t_waveguide: float = Field(ge=0, le=1)
    t_collect: float = Field(ge=0, le=1)
    t_filter: float = Field(ge=0, le=1)
    detector_efficiency: float | None = Field(default=None, ge=0, le=1)


class BudgetRequest(BudgetBody):
    eta_int: float = Field(ge=0)


class BudgetResponse(_Strict):
    eta_ext: float


class TuningCurveRequest(_Strict):
    length_mm: float = Field(gt=0)
    period_um: float = Field(gt=0)
    d_eff: float = Field(default=1.0, gt=0)
    defects: list[DefectPointBody] = Field(default_factory=list)
    num_points: int = Field(default=201, ge=2)
    q_half_span_per_um: float | None = Field(default=None, gt=0)
    mode: Literal["peak_in_window", "at_nominal_q"] = "peak_in_window"


class TuningCurveResponse(_Strict):
    q_per_um: list[float]
    relative_eta: list[float]
    peak_q_per_um: float
    peak_relative_eta: float
    fwhm_per_um: float | None
    relative_efficiency: float
    mode: str


class McRequest(_Strict):
    defect_counts: list[int]
    trials: int = Field(ge=1)
    seed: int = Field(default=42, ge=0)
    length_mm: float = Field(default=20.0, gt=0)
    period_um: float = Field(default=3.07, gt=0)
    width_mean_um: float = Field(default=12.3, gt=0)
    d_eff: float = Field(default=1.0, gt=0)
    threshold: float = Field(default=0.9, gt=0, le=1)
    mode: Literal["peak_in_window", "at_nominal_q"] = "peak_in_window"
    threads: int = Field(default=1, ge=1)
    lengths_mm: list[float] | None = None

    @model_validator(mode="after")
    def _counts_nonnegative(self):
        if not self.defect_counts:
            raise ValueError("defect_counts must be nonempty")
        if any(n < 0 for n in self.defect_counts):
            raise ValueError("defect counts must be >= 0")
        if self.lengths_mm is not None and any(l <= 0 for l in self.lengths_mm):
            raise ValueError("lengths_mm values must be positive")
        return self


class McRow(_Strict):
    length_mm: float
    defect_count: int
    p_hat: float
    ci_lo: float
    ci_hi: float
    trials: int
    zero_width_draws: int


class McResponse(_Strict):
    rows: list[McRow]


class CmeBody(_Strict):
    """Integrator parameters without a pump power."""

    eta_nor_percent_per_w_cm2: float = Field(gt=0)
    alpha1_per_cm: float = Field(ge=0)
    alpha2_per_cm: float = Field(ge=0)
    alpha3_per_cm: float = Field(ge=0)
    length_mm: float = Field(gt=0)
    signal_ratio: float = Field(default=1e-6, gt=0, le=1)


class CmeRequest(CmeBody):
    pump_mw: float | None = Field(default=None, ge=0)
    sweep_pump_mw: list[float] | None = None
    pump_reference: Literal["output", "launched"] = "output"

    @model_validator(mode="after")
    def _exactly_one_power(self):
        if (self.pump_mw is None) == (self.sweep_pump_mw is None):
            raise ValueError("provide exactly one of pump_mw and sweep_pump_mw")
        if self.sweep_pump_mw is not None:
            if not self.sweep_pump_mw:
                raise ValueError("sweep_pump_mw must be nonempty")
            if any(p < 0 for p in self.sweep_pump_mw):
                raise ValueError("sweep_pump_mw values must be >= 0")
        return self


class CmePoint(_Strict):
    pump_mw: float
    eta_int: float


class CmeResponse(_Strict):
    points: list[CmePoint]
    pump_reference: str


class NoiseBody(_Strict):
    """Noise-model coefficients; the power axis follows sign_convention."""

    a_hz_per_w_per_cm: float = Field(default=1.0, ge=0)
    alpha_pump_per_cm: float = Field(ge=0)
    alpha_dfg_per_cm: float = Field(ge=0)
    eta_nor_percent_per_w_cm2: float = Field(ge=0)
    eta_int_max: float = Field(ge=0, le=1)
    length_mm: float = Field(gt=0)
    sign_convention: Literal["printed", "attenuating"] = "printed"


class NoiseRequest(NoiseBody):
    model: Literal["lossy", "lossless"] = "lossy"
    pump_mw: float | None = Field(default=None, ge=0)
    sweep_pump_mw: list[float] | None = None

    @model_validator(mode="after")
    def _exactly_one_power(self):
        if (self.pump_mw is None) == (self.sweep_pump_mw is None):
            raise ValueError("provide exactly one of pump_mw and sweep_pump_mw")
        if self.sweep_pump_mw is not None:
            if not self.sweep_pump_mw:
                raise ValueError("sweep_pump_mw must be nonempty")
            if any(p < 0 for p in self.sweep_pump_mw):
                raise ValueError("sweep_pump_mw values must be >= 0")
        return self


class NoisePoint(_Strict):
    pump_mw: float
    noise_hz: float


class NoiseResponse(_Strict):
    points: list[NoisePoint]
    model: str


class EnrRequest(_Strict):
    noise: NoiseBody
    cme: CmeBody
    budget: BudgetBody
    sweep_pump_mw: list[float]

    @model_validator(mode="after")
    def _sweep_nonempty(self):
        if not self.sweep_pump_mw:
            raise ValueError("sweep_pump_mw must be nonempty")
        if any(p < 0 for p in self.sweep_pump_mw):
            raise ValueError("sweep_pump_mw values must be >= 0")
        return self


class EnrPointBody(_Strict):
    pump_mw: float
    eta_ext: float
    noise_hz: float
    enr: float | None


class EnrResponse(_Strict):
    points: list[EnrPointBody]
    argmax_eta_ext_mw: float
    argmax_eta_ext_index: int
    argmax_enr_mw: float | None
    argmax_enr_index: int | None
    step_gap: int | None


class FitRequest(_Strict):
    """One of the named fits; required extras depend on the model.

    ``data`` rows are (pump_mw, eta_int) for the efficiency fits and
    (pump_mw, counts_hz) for the noise fits.
    """

    model: Literal["sin2", "lowconv", "noise-lossless", "noise-lossy"]
    data: list[tuple[float, float]]
    length_mm: float | None = Field(default=None, gt=0)
    alpha1_per_cm: float | None = Field(default=None, ge=0)
    alpha2_per_cm: float | None = Field(default=None, ge=0)
    alpha3_per_cm: float | None = Field(default=None, ge=0)
    n_points: int = Field(default=5, ge=1)
    pump_reference: Literal["output", "launched"] = "output"
    noise: NoiseBody | None = None

    @model_validator(mode="after")
    def _data_nonempty(self):
        if not self.data:
            raise ValueError("data must be nonempty")
        return self


class FitParamBody(_Strict):
    name: str
    value: float
    stderr: float | None
    ci95_lo: float | None
    ci95_hi: float | None


class FitResponse(_Strict):
    model: str
    params: list[FitParamBody]
    r2: float
    residuals: list[float]
    iterations: int
    converged: bool


class CutbackRequest(_Strict):
    """Cut-back series; rows are (length_cm, transmission)."""

    points: list[tuple[float, float]]


class CutbackResponse(_Strict):
    alpha_per_cm: float
    stderr_per_cm: float | None
    r2: float


class FpRequest(_Strict):
    """Fringe measurement; rows of spectrum are (frequency_ghz, transmission)."""

    refractive_index: float = Field(gt=1)
    length_mm: float = Field(gt=0)
    spectrum: list[tuple[float, float]] | None = None
    contrast: float | None = Field(default=None, gt=0, lt=1)


class FpResponse(_Strict):
    alpha_per_cm: float
    contrast: float
    n_maxima: int | None
    n_minima: int | None


class TuningModelBody(_Strict):
    lambda_ref_nm: float = Field(gt=0)
    t_dfg_ref_c: float
    slope_dfg_c_per_pm: float
    t_spdc_ref_c: float
    slope_spdc_c_per_pm: float = 0.02


class DetuneRequest(_Strict):
    """Operating-point search; profile rows are (temperature_c, counts_hz)."""

    model: TuningModelBody
    profile: list[tuple[float, float]]
    lambda_min_nm: float
    lambda_max_nm: float
    grid_points: int = Field(default=101, ge=2)


class DetuneResponse(_Strict):
    lambda_opt_nm: float
    predicted_noise_hz: float
    t_dfg_c: float
    t_spdc_c: float


class HealthResponse(_Strict):
    status: str


class VersionResponse(_Strict):
    version: str
