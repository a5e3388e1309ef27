"""Least-squares engine and the named fits of the measurement workflow.

A closed-form linear fit and a damped Gauss-Newton nonlinear fit back four
named analyses: the sin^2 efficiency fit over a full pump sweep, the
through-origin low-conversion efficiency fit, and one-parameter fits of the
lossless and lossy noise models. A peak-ratio correction rescales a fitted
normalized efficiency from a multimode measurement to the fundamental mode.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Sequence

import numpy as np

from .cme import eta_sin2, low_conversion_gain
from .core import LossSet
from .errors import DegenerateDesignError, RankDeficiencyError, ValidationError
from .noise import NoiseParams, noise_lossless, noise_lossy

__all__ = [
    "FitParam",
    "FitResult",
    "fit_linear",
    "fit_nls",
    "fit_efficiency_low_conversion",
    "fit_efficiency_sin2",
    "fit_noise",
    "correct_higher_modes",
]

NLS_MAX_ITERATIONS = 200
NLS_REL_TOL = 1e-10
_JACOBIAN_STEP_SCALE = 1e-6
_RANK_RTOL = 1e-12
_Z95 = 1.96


@dataclass(frozen=True)
class FitParam:
    """One fitted parameter with its standard error and 95 percent interval.

    ``stderr`` and the interval bounds are None when the fit has no spare
    degrees of freedom to estimate the residual variance.
    """

    name: str
    value: float
    stderr: float | None
    ci95_lo: float | None
    ci95_hi: float | None


@dataclass(frozen=True)
class FitResult:
    params: tuple[FitParam, ...]
    r2: float
    residuals: tuple[float, ...]
    iterations: int
    converged: bool

    def param(self, name: str) -> FitParam:
        for p in self.params:
            if p.name == name:
                return p
        raise KeyError(f"no fitted parameter named {name!r}")

    def value(self, name: str) -> float:
        return self.param(name).value


def _fit_param(name: str, value: float, variance: float | None) -> FitParam:
    if variance is None:
        return FitParam(name, value, None, None, None)
    stderr = math.sqrt(max(variance, 0.0))
    return FitParam(name, value, stderr, value - _Z95 * stderr, value + _Z95 * stderr)


def _r2(y: np.ndarray, residuals: np.ndarray) -> float:
    ssr = float(residuals @ residuals)
    sst = float(np.sum((y - y.mean()) ** 2))
    if sst == 0.0:
        return 1.0 if ssr <= 1e-30 else 0.0
    return 1.0 - ssr / sst


def fit_linear(x: Sequence[float], y: Sequence[float]) -> FitResult:
    """Ordinary least squares line fit with closed-form covariance.

    Returns parameters named ``slope`` and ``intercept``. With exactly two
    points the line interpolates and the standard errors are absent.
    """
    xa = np.asarray(x, dtype=float)
    ya = np.asarray(y, dtype=float)
    if xa.shape != ya.shape or xa.ndim != 1:
        raise ValidationError("x and y must be one-dimensional and equally long")
    n = xa.size
    if n < 2 or np.unique(xa).size < 2:
        raise DegenerateDesignError("line fit needs at least 2 distinct x values")

    x_mean = float(xa.mean())
    sxx = float(np.sum((xa - x_mean) ** 2))
    slope = float(np.sum((xa - x_mean) * (ya - ya.mean())) / sxx)
    intercept = float(ya.mean() - slope * x_mean)
    residuals = ya - (slope * xa + intercept)
    ssr = float(residuals @ residuals)

    if n > 2:
        s2 = ssr / (n - 2)
        var_slope = s2 / sxx
        var_intercept = s2 * (1.0 / n + x_mean**2 / sxx)
    else:
        var_slope = var_intercept = None
    return FitResult(
        params=(
            _fit_param("slope", slope, var_slope),
            _fit_param("intercept", intercept, var_intercept),
        ),
        r2=_r2(ya, residuals),
        residuals=tuple(float(r) for r in residuals),
        iterations=1,
        converged=True,
    )


def _clip_to_bounds(p: np.ndarray, bounds) -> np.ndarray:
    if bounds is None:
        return p
    lo, hi = bounds
    return np.clip(p, np.asarray(lo, dtype=float), np.asarray(hi, dtype=float))


def _jacobian(
    model: Callable[[float, np.ndarray], float],
    xs: np.ndarray,
    p: np.ndarray,
    bounds,
) -> np.ndarray:
    jac = np.empty((xs.size, p.size))
    for j in range(p.size):
        step = _JACOBIAN_STEP_SCALE * max(abs(p[j]), 1.0)
        p_hi = p.copy()
        p_lo = p.copy()
        p_hi[j] += step
        p_lo[j] -= step
        p_hi = _clip_to_bounds(p_hi, bounds)
        p_lo = _clip_to_bounds(p_lo, bounds)
        span = p_hi[j] - p_lo[j]
        if span == 0.0:
            jac[:, j] = 0.0
            continue
        f_hi = np.array([model(xv, p_hi) for xv in xs])
        f_lo = np.array([model(xv, p_lo) for xv in xs])
        jac[:, j] = (f_hi - f_lo) / span
    return jac


def fit_nls(
    model: Callable[[float, np.ndarray], float],
    data: Sequence[tuple[float, float]],
    init: Sequence[float],
    bounds: tuple[Sequence[float], Sequence[float]] | None = None,
    param_names: Sequence[str] | None = None,
    max_iterations: int = NLS_MAX_ITERATIONS,
    rel_tol: float = NLS_REL_TOL,
) -> FitResult:
    """Damped Gauss-Newton fit with a central-difference Jacobian.

    The damping factor multiplies the identity added to the normal equations;
    it shrinks tenfold after an accepted step and grows tenfold after a
    rejected one. Iteration stops when the relative parameter change drops
    below ``rel_tol``; hitting the iteration cap returns the best point with
    ``converged=False``. A Jacobian that is rank-deficient at the starting
    point raises :class:`RankDeficiencyError`.
    """
    if not data:
        raise ValidationError("fit data must be nonempty")
    xs = np.array([float(d[0]) for d in data])
    ys = np.array([float(d[1]) for d in data])
    p = np.asarray(init, dtype=float).copy()
    if p.ndim != 1 or p.size == 0:
        raise ValidationError("init must be a nonempty parameter vector")
    if xs.size < p.size:
        raise ValidationError(
            f"need at least as many points ({xs.size}) as parameters ({p.size})"
        )
    p = _clip_to_bounds(p, bounds)
    names = list(param_names) if param_names is not None else [f"p{j}" for j in range(p.size)]
    if len(names) != p.size:
        raise ValidationError("param_names length must match init length")

    def predictions(params: np.ndarray) -> np.ndarray:
        return np.array([model(xv, params) for xv in xs])

    residuals = ys - predictions(p)
    sse = float(residuals @ residuals)
    jac = _jacobian(model, xs, p, bounds)
    singular_values = np.linalg.svd(jac, compute_uv=False)
    if singular_values[-1] < _RANK_RTOL * max(singular_values[0], 1e-300):
        raise RankDeficiencyError(
            "model Jacobian is rank-deficient at the starting point; "
            "a parameter is redundant or unidentifiable"
        )

    damping = 1e-3
    converged = False
    iterations = 0
    for iterations in range(1, max_iterations + 1):
        jtj = jac.T @ jac
        jtr = jac.T @ residuals
        delta = np.linalg.solve(jtj + damping * np.eye(p.size), jtr)
        p_trial = _clip_to_bounds(p + delta, bounds)
        trial_residuals = ys - predictions(p_trial)
        trial_sse = float(trial_residuals @ trial_residuals)
        if trial_sse <= sse:
            rel_change = float(
                np.max(np.abs(p_trial - p) / np.maximum(np.abs(p), 1.0))
            )
            p, residuals, sse = p_trial, trial_residuals, trial_sse
            damping = max(damping * 0.1, 1e-12)
            jac = _jacobian(model, xs, p, bounds)
            if rel_change < rel_tol:
                converged = True
                break
        else:
            damping *= 10.0
            if damping > 1e12:
                break

    dof = xs.size - p.size
    variances: list[float | None]
    if dof > 0:
        s2 = sse / dof
        jtj = jac.T @ jac
        try:
            cov = np.linalg.inv(jtj) * s2
            variances = [float(cov[j, j]) for j in range(p.size)]
        except np.linalg.LinAlgError:
            variances = [None] * p.size
    else:
        variances = [None] * p.size

    return FitResult(
        params=tuple(
            _fit_param(names[j], float(p[j]), variances[j]) for j in range(p.size)
        ),
        r2=_r2(ys, residuals),
        residuals=tuple(float(r) for r in residuals),
        iterations=iterations,
        converged=converged,
    )


def _through_origin(x: np.ndarray, y: np.ndarray) -> tuple[float, float | None, np.ndarray]:
    """Least-squares slope of y = slope * x, its variance, and residuals."""
    sxx = float(x @ x)
    if sxx == 0.0:
        raise DegenerateDesignError("all abscissa values are zero")
    slope = float(x @ y) / sxx
    residuals = y - slope * x
    if x.size > 1:
        s2 = float(residuals @ residuals) / (x.size - 1)
        var_slope = s2 / sxx
    else:
        var_slope = None
    return slope, var_slope, residuals


def fit_efficiency_low_conversion(
    data: Sequence[tuple[float, float]],
    losses: LossSet,
    length_cm: float,
    n_points: int = 5,
) -> FitResult:
    """Normalized efficiency from the low-power region of an efficiency sweep.

    Fits eta_int = slope * P2_out through the origin on the ``n_points``
    lowest-power points (data are sorted internally, so input order does not
    matter) and divides the slope by the loss-aggregation gain to obtain
    ``eta_nor``. The power axis is output-referenced pump power in watts.
    """
    if n_points < 1:
        raise ValidationError(f"n_points must be >= 1, got {n_points}")
    if n_points > len(data):
        raise ValidationError(
            f"n_points ({n_points}) exceeds the number of data points ({len(data)})"
        )
    ordered = sorted((float(p), float(e)) for p, e in data)[:n_points]
    x = np.array([p for p, _ in ordered])
    y = np.array([e for _, e in ordered])
    slope, var_slope, residuals = _through_origin(x, y)

    gain = low_conversion_gain(losses, length_cm)
    eta_nor = slope / gain
    var_eta = var_slope / gain**2 if var_slope is not None else None
    return FitResult(
        params=(_fit_param("eta_nor", eta_nor, var_eta),),
        r2=_r2(y, residuals),
        residuals=tuple(float(r) for r in residuals),
        iterations=1,
        converged=True,
    )


def fit_efficiency_sin2(
    data: Sequence[tuple[float, float]], length_cm: float
) -> FitResult:
    """Normalized efficiency from a sin^2 fit over the full pump sweep.

    The model ignores propagation losses, so on lossy data the fitted value
    overshoots the true normalized efficiency. Initialized from a
    through-origin line with the low-power limit slope eta_nor * L^2.
    """
    if not data:
        raise ValidationError("fit data must be nonempty")
    if length_cm <= 0:
        raise ValidationError(f"length_cm must be positive, got {length_cm}")
    x = np.array([float(p) for p, _ in data])
    y = np.array([float(e) for _, e in data])
    try:
        slope, _, _ = _through_origin(x, y)
    except DegenerateDesignError:
        slope = 0.0
    init = max(slope / length_cm**2, 1e-6)

    def model(p_w: float, params: np.ndarray) -> float:
        return eta_sin2(params[0], p_w, length_cm)

    return fit_nls(
        model,
        list(zip(x, y)),
        init=[init],
        bounds=([0.0], [np.inf]),
        param_names=["eta_nor"],
    )


_NOISE_MODELS = ("lossless", "lossy")


def fit_noise(
    data: Sequence[tuple[float, float]],
    fixed: NoiseParams,
    model: str = "lossy",
) -> FitResult:
    """Generation coefficient from measured noise counts versus pump power.

    All parameters except ``a_hz_per_w_per_cm`` are taken from ``fixed`` (its
    own ``a`` value is ignored). The model is linear in a, so the fit is the
    closed-form projection a = sum(m*y)/sum(m*m) onto the unit-coefficient
    model curve m(P).
    """
    if model not in _NOISE_MODELS:
        raise ValidationError(
            f"unknown noise model {model!r}; choose one of {', '.join(_NOISE_MODELS)}"
        )
    if not data:
        raise ValidationError("fit data must be nonempty")
    basis_params = replace(fixed, a_hz_per_w_per_cm=1.0)
    evaluate = noise_lossless if model == "lossless" else noise_lossy
    x = np.array([float(p) for p, _ in data])
    y = np.array([float(c) for _, c in data])
    m = np.array([evaluate(p, basis_params) for p in x])
    if float(m @ m) == 0.0:
        raise DegenerateDesignError(
            "model predictions are identically zero; a is unidentifiable"
        )
    a, var_a, residuals = _through_origin(m, y)
    return FitResult(
        params=(_fit_param("a_hz_per_w_per_cm", a, var_a),),
        r2=_r2(y, residuals),
        residuals=tuple(float(r) for r in residuals),
        iterations=1,
        converged=True,
    )


def correct_higher_modes(
    eta_nor_fit: float, eta_peak_measured: float, eta_peak_simulated: float
) -> float:
    """Rescale a fitted normalized efficiency to the fundamental guided mode.

    Power launched into higher-order modes dilutes the measured peak
    efficiency relative to the simulated single-mode peak; multiplying by
    the simulated/measured peak ratio removes that dilution.
    """
    if eta_peak_measured <= 0:
        raise ValidationError(
            f"measured peak efficiency must be positive, got {eta_peak_measured}"
        )
    return eta_nor_fit * (eta_peak_simulated / eta_peak_measured)
