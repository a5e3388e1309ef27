"""Simulation and measurement-analysis toolkit for quasi-phase-matched
frequency-conversion waveguides.

Submodules group by concern: ``defects`` (domain-inversion defects and
tuning curves), ``montecarlo`` (yield statistics over random defect maps),
``cme`` (lossy three-wave coupled-mode integration), ``noise`` (pump-induced
noise models and efficiency-to-noise ratio), ``tuning`` (operating-point
prediction and pump detuning), ``fitting`` (efficiency and noise fits),
``loss`` (cut-back and fringe-contrast loss extraction), ``service`` (HTTP
API), ``client`` (typed client, in-process by default), and ``cli``.
"""

from .cme import (
    CmeParams,
    CmeState,
    eta_low_conversion_lossy,
    eta_sin2,
    integrate_cme,
    internal_efficiency,
    internal_efficiency_curve,
    low_conversion_gain,
    pin_eta_nor_to_peak,
)
from .core import (
    LossSet,
    ThroughputBudget,
    WaveguideSpec,
    check_energy_conservation,
    external_efficiency,
)
from .defects import (
    DefectMap,
    TuningCurve,
    curve_fwhm,
    efficiency_evolution,
    ideal_peak,
    phase_shift,
    relative_efficiency,
    tuning_curve,
)
from .errors import (
    ContrastExceedsReflectionError,
    DataFormatError,
    DegenerateDesignError,
    InsufficientFringesError,
    IntegrationError,
    NumericalError,
    OutOfRangeError,
    QfcsimError,
    QuadratureError,
    RankDeficiencyError,
    ValidationError,
)
from .fitting import (
    FitParam,
    FitResult,
    correct_higher_modes,
    fit_efficiency_low_conversion,
    fit_efficiency_sin2,
    fit_linear,
    fit_nls,
    fit_noise,
)
from .loss import (
    CutbackDataset,
    CutbackResult,
    FpMeasurement,
    cutback_fit,
    facet_reflectivity,
    find_fringe_extrema,
    fp_contrast,
    fp_contrast_from_loss,
    fp_loss,
    fp_loss_from_measurement,
)
from .montecarlo import (
    McConfig,
    WidthDistribution,
    YieldResult,
    efficiency_distribution,
    probability_vs_length,
    run_yield,
    success_probability,
)
from .noise import (
    EnrCurve,
    EnrPoint,
    NoiseParams,
    enr_curve,
    noise_lossless,
    noise_lossy,
)
from .tuning import (
    NoiseProfile,
    TuningModel,
    crossing_wavelength_nm,
    predict_operating_points,
    suggest_pump_detuning,
)

__version__ = "1.0.0"

__all__ = [
    "__version__",
    # core types
    "WaveguideSpec",
    "LossSet",
    "ThroughputBudget",
    "external_efficiency",
    "check_energy_conservation",
    # defects
    "DefectMap",
    "TuningCurve",
    "phase_shift",
    "tuning_curve",
    "curve_fwhm",
    "relative_efficiency",
    "efficiency_evolution",
    "ideal_peak",
    # monte carlo
    "WidthDistribution",
    "McConfig",
    "YieldResult",
    "run_yield",
    "success_probability",
    "efficiency_distribution",
    "probability_vs_length",
    # coupled-mode integration
    "CmeParams",
    "CmeState",
    "integrate_cme",
    "internal_efficiency",
    "internal_efficiency_curve",
    "eta_sin2",
    "eta_low_conversion_lossy",
    "low_conversion_gain",
    "pin_eta_nor_to_peak",
    # noise
    "NoiseParams",
    "noise_lossless",
    "noise_lossy",
    "EnrPoint",
    "EnrCurve",
    "enr_curve",
    # tuning
    "TuningModel",
    "NoiseProfile",
    "predict_operating_points",
    "crossing_wavelength_nm",
    "suggest_pump_detuning",
    # fitting
    "FitParam",
    "FitResult",
    "fit_linear",
    "fit_nls",
    "fit_efficiency_low_conversion",
    "fit_efficiency_sin2",
    "fit_noise",
    "correct_higher_modes",
    # loss
    "CutbackDataset",
    "CutbackResult",
    "cutback_fit",
    "find_fringe_extrema",
    "fp_contrast",
    "FpMeasurement",
    "facet_reflectivity",
    "fp_loss",
    "fp_contrast_from_loss",
    "fp_loss_from_measurement",
    # errors
    "QfcsimError",
    "ValidationError",
    "DataFormatError",
    "OutOfRangeError",
    "DegenerateDesignError",
    "InsufficientFringesError",
    "ContrastExceedsReflectionError",
    "NumericalError",
    "IntegrationError",
    "QuadratureError",
    "RankDeficiencyError",
]
