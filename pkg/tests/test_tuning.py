"""Linear counter-tuning model and the pump-detuning suggestion."""

import math

import numpy as np
import pytest

from qfcsim.errors import OutOfRangeError, ValidationError
from qfcsim.tuning import (
    DEFAULT_SPDC_SLOPE_C_PER_PM,
    NoiseProfile,
    TuningModel,
    crossing_wavelength_nm,
    predict_operating_points,
    suggest_pump_detuning,
)


@pytest.fixture
def bench_model():
    # Slopes of opposite sign: the conversion temperature falls with pump
    # wavelength while the noise structure rises.
    return TuningModel(
        lambda_ref_nm=527.37,
        t_dfg_ref_c=33.0,
        slope_dfg_c_per_pm=-0.01,
        t_spdc_ref_c=33.0,
        slope_spdc_c_per_pm=0.02,
    )


class TestPrediction:
    def test_linear_extrapolation(self, bench_model):
        t_dfg, t_spdc = predict_operating_points(bench_model, 527.30)
        # 70 pm blue detuning: -0.01 C/pm raises, +0.02 C/pm lowers.
        assert t_dfg == pytest.approx(33.7, abs=1e-9)
        assert t_spdc == pytest.approx(31.6, abs=1e-9)

    def test_reference_wavelength_returns_references(self, bench_model):
        assert predict_operating_points(bench_model, 527.37) == (33.0, 33.0)

    def test_default_slope_is_measured_value(self):
        model = TuningModel(527.37, 33.0, -0.01, 33.0)
        assert model.slope_spdc_c_per_pm == DEFAULT_SPDC_SLOPE_C_PER_PM == 0.02

    def test_crossing_wavelength(self):
        model = TuningModel(527.37, 33.0, -0.01, 32.7, 0.02)
        lam = crossing_wavelength_nm(model)
        assert lam == pytest.approx(527.38, abs=1e-12)
        t_dfg, t_spdc = predict_operating_points(model, lam)
        assert t_dfg == pytest.approx(t_spdc, abs=1e-9)

    def test_equal_slopes_never_cross(self):
        model = TuningModel(527.37, 33.0, 0.02, 32.7, 0.02)
        with pytest.raises(ValidationError):
            crossing_wavelength_nm(model)

    def test_model_validation(self):
        with pytest.raises(ValidationError):
            TuningModel(-527.37, 33.0, -0.01, 33.0)
        with pytest.raises(ValidationError):
            TuningModel(527.37, math.nan, -0.01, 33.0)


class TestNoiseProfile:
    def test_from_lists_and_support(self):
        profile = NoiseProfile.from_lists([30.0, 31.0, 32.0], [5.0, 9.0, 4.0])
        assert profile.support_c == (30.0, 32.0)
        assert list(profile.temperatures_c) == [30.0, 31.0, 32.0]
        assert list(profile.counts_hz) == [5.0, 9.0, 4.0]

    def test_requires_two_samples(self):
        with pytest.raises(ValidationError):
            NoiseProfile(((30.0, 5.0),))

    def test_requires_strictly_increasing_temperatures(self):
        with pytest.raises(ValidationError):
            NoiseProfile.from_lists([30.0, 30.0], [1.0, 2.0])
        with pytest.raises(ValidationError):
            NoiseProfile.from_lists([31.0, 30.0], [1.0, 2.0])

    def test_requires_finite_samples(self):
        with pytest.raises(ValidationError):
            NoiseProfile.from_lists([30.0, math.inf], [1.0, 2.0])
        with pytest.raises(ValidationError):
            NoiseProfile.from_lists([30.0, 31.0], [1.0, math.nan])

    def test_mismatched_lengths_rejected(self):
        with pytest.raises(ValidationError):
            NoiseProfile.from_lists([30.0, 31.0], [1.0])


class TestDetuningSuggestion:
    def test_two_peak_profile_moves_into_valley(self, bench_model, two_peak_profile_arrays):
        temps, counts = two_peak_profile_arrays
        profile = NoiseProfile.from_lists(temps.tolist(), counts.tolist())
        lam, noise = suggest_pump_detuning(bench_model, profile, (527.30, 527.50), 101)
        assert lam == pytest.approx(527.42, abs=1e-9)
        assert noise == pytest.approx(300.1602258656932, rel=1e-12)
        # Zero detuning sits on the tall peak; the suggestion cuts the noise
        # about fourfold.
        baseline = float(np.interp(33.0, temps, counts))
        assert baseline == pytest.approx(1220.48, rel=1e-12)
        assert baseline / noise > 4.0

    def test_tie_resolves_to_smallest_wavelength(self, bench_model):
        profile = NoiseProfile.from_lists([25.0, 40.0], [7.0, 7.0])
        lam, noise = suggest_pump_detuning(bench_model, profile, (527.30, 527.50), 11)
        assert lam == 527.30
        assert noise == 7.0

    def test_noise_scale_invariance(self, bench_model, two_peak_profile_arrays):
        temps, counts = two_peak_profile_arrays
        profile = NoiseProfile.from_lists(temps.tolist(), counts.tolist())
        scaled = NoiseProfile.from_lists(temps.tolist(), (10.0 * counts).tolist())
        lam1, noise1 = suggest_pump_detuning(bench_model, profile, (527.30, 527.50), 101)
        lam2, noise2 = suggest_pump_detuning(bench_model, scaled, (527.30, 527.50), 101)
        assert lam2 == lam1
        assert noise2 == pytest.approx(10.0 * noise1, rel=1e-12)

    def test_out_of_range_names_wavelength_and_support(self, bench_model):
        profile = NoiseProfile.from_lists([32.5, 33.5], [5.0, 6.0])
        with pytest.raises(OutOfRangeError) as excinfo:
            suggest_pump_detuning(bench_model, profile, (527.30, 527.50), 11)
        message = str(excinfo.value)
        assert "527.3" in message
        assert "32.5" in message and "33.5" in message

    def test_grid_and_range_validation(self, bench_model, two_peak_profile_arrays):
        temps, counts = two_peak_profile_arrays
        profile = NoiseProfile.from_lists(temps.tolist(), counts.tolist())
        with pytest.raises(ValidationError):
            suggest_pump_detuning(bench_model, profile, (527.30, 527.50), 1)
        with pytest.raises(ValidationError):
            suggest_pump_detuning(bench_model, profile, (527.50, 527.30), 11)
