"""HTTP service exposing the simulation and analysis operations.

Route handlers convert user-facing units (mm, um, mW, percent efficiency)
to the library's internal units, call the core functions, and shape typed
responses. Domain errors surface as HTTP 422 with a typed error envelope
{"error": {"type", "message", ...}} so clients can rebuild the exception.
"""

from __future__ import annotations

import math

from fastapi import FastAPI
from fastapi.responses import JSONResponse

from .. import __version__
from ..cme import CmeParams, internal_efficiency
from ..core import LossSet, ThroughputBudget, WaveguideSpec, external_efficiency
from ..defects import DefectMap, curve_fwhm, relative_efficiency, tuning_curve
from ..errors import QfcsimError, ValidationError
from ..fitting import (
    FitResult,
    fit_efficiency_low_conversion,
    fit_efficiency_sin2,
    fit_noise,
)
from ..loss import (
    CutbackDataset,
    FpMeasurement,
    cutback_fit,
    find_fringe_extrema,
    fp_loss_from_measurement,
)
from ..montecarlo import McConfig, WidthDistribution, run_yield
from ..noise import NoiseParams, enr_curve, noise_lossless, noise_lossy
from ..tuning import NoiseProfile, TuningModel, predict_operating_points, suggest_pump_detuning
from ..units import (
    internal_to_percent_per_w_cm2,
    mm_to_cm,
    mw_to_w,
    output_to_launched_power,
    percent_per_w_cm2_to_internal,
    w_to_mw,
)
from . import schemas as s

# Error payload attributes forwarded so clients can rebuild typed exceptions.
_ERROR_DETAIL_ATTRS = (
    "would_be_alpha_per_cm",
    "partial_estimate",
    "rel_change",
    "last_two_endpoints",
    "source",
    "problems",
)


def create_app() -> FastAPI:
    app = FastAPI(title="qfcsim", version=__version__)

    @app.exception_handler(QfcsimError)
    async def _domain_error(request, exc: QfcsimError):
        detail = {"type": type(exc).__name__, "message": str(exc)}
        for attr in _ERROR_DETAIL_ATTRS:
            if hasattr(exc, attr):
                detail[attr] = getattr(exc, attr)
        return JSONResponse(status_code=422, content={"error": detail})

    @app.get("/v1/health", response_model=s.HealthResponse)
    def health() -> s.HealthResponse:
        return s.HealthResponse(status="ok")

    @app.get("/v1/version", response_model=s.VersionResponse)
    def version() -> s.VersionResponse:
        return s.VersionResponse(version=__version__)

    @app.post("/v1/budget", response_model=s.BudgetResponse)
    def budget(req: s.BudgetRequest) -> s.BudgetResponse:
        budget_factors = ThroughputBudget(
            t_waveguide=req.t_waveguide,
            t_collect=req.t_collect,
            t_filter=req.t_filter,
            detector_efficiency=req.detector_efficiency,
        )
        return s.BudgetResponse(eta_ext=external_efficiency(budget_factors, req.eta_int))

    @app.post("/v1/tuning-curve", response_model=s.TuningCurveResponse)
    def tuning_curve_route(req: s.TuningCurveRequest) -> s.TuningCurveResponse:
        spec = WaveguideSpec(
            length_cm=mm_to_cm(req.length_mm),
            poling_period_um=req.period_um,
            d_eff=req.d_eff,
        )
        defects = DefectMap.from_lists(
            [d.position_um for d in req.defects],
            [d.width_um for d in req.defects],
        )
        q_nominal = 1.0 / req.period_um
        half_span = (
            req.q_half_span_per_um
            if req.q_half_span_per_um is not None
            else 10.0 / spec.length_um
        )
        curve = tuning_curve(
            spec, defects, q_nominal - half_span, q_nominal + half_span, req.num_points
        )
        values = list(curve.relative_eta)
        i_peak = max(range(len(values)), key=values.__getitem__)
        return s.TuningCurveResponse(
            q_per_um=list(curve.q_values),
            relative_eta=values,
            peak_q_per_um=curve.q_values[i_peak],
            peak_relative_eta=values[i_peak],
            fwhm_per_um=curve_fwhm(curve),
            relative_efficiency=relative_efficiency(spec, defects, mode=req.mode),
            mode=req.mode,
        )

    @app.post("/v1/mc", response_model=s.McResponse)
    def mc(req: s.McRequest) -> s.McResponse:
        dist = WidthDistribution(mean_um=req.width_mean_um)
        cfg = McConfig(
            trials=req.trials, seed=req.seed, threshold=req.threshold, mode=req.mode
        )
        lengths_mm = req.lengths_mm if req.lengths_mm is not None else [req.length_mm]
        rows = []
        for length_mm in lengths_mm:
            spec = WaveguideSpec(
                length_cm=mm_to_cm(length_mm),
                poling_period_um=req.period_um,
                d_eff=req.d_eff,
            )
            for n_defects in req.defect_counts:
                result = run_yield(spec, n_defects, dist, cfg, workers=req.threads)
                rows.append(
                    s.McRow(
                        length_mm=length_mm,
                        defect_count=n_defects,
                        p_hat=result.p_hat,
                        ci_lo=result.ci_lo,
                        ci_hi=result.ci_hi,
                        trials=result.trials,
                        zero_width_draws=result.zero_width_draws,
                    )
                )
        return s.McResponse(rows=rows)

    def _cme_params(body: s.CmeBody, p2_in_w: float) -> CmeParams:
        return CmeParams(
            eta_nor=percent_per_w_cm2_to_internal(body.eta_nor_percent_per_w_cm2),
            losses=LossSet(
                alpha1_per_cm=body.alpha1_per_cm,
                alpha2_per_cm=body.alpha2_per_cm,
                alpha3_per_cm=body.alpha3_per_cm,
            ),
            length_cm=mm_to_cm(body.length_mm),
            input_powers_w=(body.signal_ratio * p2_in_w, p2_in_w),
        )

    @app.post("/v1/cme", response_model=s.CmeResponse)
    def cme(req: s.CmeRequest) -> s.CmeResponse:
        sweep = req.sweep_pump_mw if req.sweep_pump_mw is not None else [req.pump_mw]
        length_cm = mm_to_cm(req.length_mm)
        points = []
        for pump_mw in sweep:
            p_w = mw_to_w(pump_mw)
            if p_w == 0.0:
                points.append(s.CmePoint(pump_mw=pump_mw, eta_int=0.0))
                continue
            if req.pump_reference == "output":
                p2_in = output_to_launched_power(p_w, req.alpha2_per_cm, length_cm)
            else:
                p2_in = p_w
            eta = internal_efficiency(_cme_params(req, p2_in))
            points.append(s.CmePoint(pump_mw=pump_mw, eta_int=eta))
        return s.CmeResponse(points=points, pump_reference=req.pump_reference)

    def _noise_params(body: s.NoiseBody) -> NoiseParams:
        return NoiseParams(
            a_hz_per_w_per_cm=body.a_hz_per_w_per_cm,
            alpha_pump_per_cm=body.alpha_pump_per_cm,
            alpha_dfg_per_cm=body.alpha_dfg_per_cm,
            eta_nor=percent_per_w_cm2_to_internal(body.eta_nor_percent_per_w_cm2),
            eta_int_max=body.eta_int_max,
            length_cm=mm_to_cm(body.length_mm),
            sign_convention=body.sign_convention,
        )

    @app.post("/v1/noise", response_model=s.NoiseResponse)
    def noise(req: s.NoiseRequest) -> s.NoiseResponse:
        params = _noise_params(req)
        evaluate = noise_lossless if req.model == "lossless" else noise_lossy
        sweep = req.sweep_pump_mw if req.sweep_pump_mw is not None else [req.pump_mw]
        points = [
            s.NoisePoint(pump_mw=pump_mw, noise_hz=evaluate(mw_to_w(pump_mw), params))
            for pump_mw in sweep
        ]
        return s.NoiseResponse(points=points, model=req.model)

    @app.post("/v1/enr", response_model=s.EnrResponse)
    def enr(req: s.EnrRequest) -> s.EnrResponse:
        budget_factors = ThroughputBudget(
            t_waveguide=req.budget.t_waveguide,
            t_collect=req.budget.t_collect,
            t_filter=req.budget.t_filter,
            detector_efficiency=req.budget.detector_efficiency,
        )
        curve = enr_curve(
            [mw_to_w(p) for p in req.sweep_pump_mw],
            _noise_params(req.noise),
            _cme_params(req.cme, 1.0),
            budget_factors,
        )
        points = [
            s.EnrPointBody(
                pump_mw=w_to_mw(pt.p_w), eta_ext=pt.eta_ext, noise_hz=pt.noise_hz, enr=pt.enr
            )
            for pt in curve.points
        ]
        step_gap = (
            abs(curve.argmax_eta_ext_index - curve.argmax_enr_index)
            if curve.argmax_enr_index is not None
            else None
        )
        return s.EnrResponse(
            points=points,
            argmax_eta_ext_mw=w_to_mw(curve.argmax_eta_ext_w),
            argmax_eta_ext_index=curve.argmax_eta_ext_index,
            argmax_enr_mw=(
                w_to_mw(curve.argmax_enr_w) if curve.argmax_enr_w is not None else None
            ),
            argmax_enr_index=curve.argmax_enr_index,
            step_gap=step_gap,
        )

    def _require(req: s.FitRequest, field_names: tuple[str, ...]) -> None:
        missing = [name for name in field_names if getattr(req, name) is None]
        if missing:
            raise ValidationError(
                f"fit model {req.model!r} requires: {', '.join(missing)}"
            )

    def _percent_param(result: FitResult, name: str) -> list[s.FitParamBody]:
        out = []
        for p in result.params:
            if p.name == name:
                out.append(
                    s.FitParamBody(
                        name=f"{name}_percent_per_w_cm2",
                        value=internal_to_percent_per_w_cm2(p.value),
                        stderr=(
                            internal_to_percent_per_w_cm2(p.stderr)
                            if p.stderr is not None
                            else None
                        ),
                        ci95_lo=(
                            internal_to_percent_per_w_cm2(p.ci95_lo)
                            if p.ci95_lo is not None
                            else None
                        ),
                        ci95_hi=(
                            internal_to_percent_per_w_cm2(p.ci95_hi)
                            if p.ci95_hi is not None
                            else None
                        ),
                    )
                )
            else:
                out.append(
                    s.FitParamBody(
                        name=p.name,
                        value=p.value,
                        stderr=p.stderr,
                        ci95_lo=p.ci95_lo,
                        ci95_hi=p.ci95_hi,
                    )
                )
        return out

    def _plain_params(result: FitResult) -> list[s.FitParamBody]:
        return [
            s.FitParamBody(
                name=p.name,
                value=p.value,
                stderr=p.stderr,
                ci95_lo=p.ci95_lo,
                ci95_hi=p.ci95_hi,
            )
            for p in result.params
        ]

    @app.post("/v1/fit", response_model=s.FitResponse)
    def fit(req: s.FitRequest) -> s.FitResponse:
        data_w = [(mw_to_w(p), y) for p, y in req.data]
        if req.model == "sin2":
            _require(req, ("length_mm",))
            result = fit_efficiency_sin2(data_w, mm_to_cm(req.length_mm))
            params = _percent_param(result, "eta_nor")
        elif req.model == "lowconv":
            _require(req, ("length_mm", "alpha1_per_cm", "alpha2_per_cm", "alpha3_per_cm"))
            length_cm = mm_to_cm(req.length_mm)
            losses = LossSet(
                alpha1_per_cm=req.alpha1_per_cm,
                alpha2_per_cm=req.alpha2_per_cm,
                alpha3_per_cm=req.alpha3_per_cm,
            )
            if req.pump_reference == "launched":
                factor = math.exp(-req.alpha2_per_cm * length_cm)
                data_w = [(p * factor, y) for p, y in data_w]
            result = fit_efficiency_low_conversion(
                data_w, losses, length_cm, n_points=req.n_points
            )
            params = _percent_param(result, "eta_nor")
        else:  # noise-lossless | noise-lossy
            if req.noise is None:
                raise ValidationError(
                    f"fit model {req.model!r} requires the fixed noise parameters"
                )
            result = fit_noise(
                data_w, _noise_params(req.noise), model=req.model.removeprefix("noise-")
            )
            params = _plain_params(result)
        return s.FitResponse(
            model=req.model,
            params=params,
            r2=result.r2,
            residuals=list(result.residuals),
            iterations=result.iterations,
            converged=result.converged,
        )

    @app.post("/v1/loss/cutback", response_model=s.CutbackResponse)
    def loss_cutback(req: s.CutbackRequest) -> s.CutbackResponse:
        result = cutback_fit(CutbackDataset(tuple(req.points)))
        return s.CutbackResponse(
            alpha_per_cm=result.alpha_per_cm,
            stderr_per_cm=result.stderr_per_cm,
            r2=result.r2,
        )

    @app.post("/v1/loss/fp", response_model=s.FpResponse)
    def loss_fp(req: s.FpRequest) -> s.FpResponse:
        measurement = FpMeasurement(
            refractive_index=req.refractive_index,
            length_cm=mm_to_cm(req.length_mm),
            spectrum=tuple(req.spectrum) if req.spectrum is not None else None,
            contrast=req.contrast,
        )
        if req.spectrum is not None:
            maxima, minima = find_fringe_extrema(req.spectrum)
            n_maxima, n_minima = len(maxima), len(minima)
        else:
            n_maxima = n_minima = None
        return s.FpResponse(
            alpha_per_cm=fp_loss_from_measurement(measurement),
            contrast=measurement.fringe_contrast(),
            n_maxima=n_maxima,
            n_minima=n_minima,
        )

    @app.post("/v1/detune", response_model=s.DetuneResponse)
    def detune(req: s.DetuneRequest) -> s.DetuneResponse:
        model = TuningModel(
            lambda_ref_nm=req.model.lambda_ref_nm,
            t_dfg_ref_c=req.model.t_dfg_ref_c,
            slope_dfg_c_per_pm=req.model.slope_dfg_c_per_pm,
            t_spdc_ref_c=req.model.t_spdc_ref_c,
            slope_spdc_c_per_pm=req.model.slope_spdc_c_per_pm,
        )
        profile = NoiseProfile(tuple((t, c) for t, c in req.profile))
        lambda_opt, predicted = suggest_pump_detuning(
            model,
            profile,
            (req.lambda_min_nm, req.lambda_max_nm),
            req.grid_points,
        )
        t_dfg, t_spdc = predict_operating_points(model, lambda_opt)
        return s.DetuneResponse(
            lambda_opt_nm=lambda_opt,
            predicted_noise_hz=predicted,
            t_dfg_c=t_dfg,
            t_spdc_c=t_spdc,
        )

    return app
