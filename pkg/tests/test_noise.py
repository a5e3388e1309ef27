"""Pump-induced noise models and the efficiency-to-noise sweep.

Frozen reference values come from mpmath adaptive quadrature at 30
significant digits (tools/oracles/noise_reference.py) with the coefficient
a = 1, pump attenuation 0.20 /cm, generated-photon decay 0.12 /cm, ceiling
eta_int_max = 0.93, length 2 cm, and eta_nor pinned so the conversion peak
sits at 52 mW output power.
"""

import math

import mpmath as mp
import pytest

import qfcsim.noise as noise_module
from qfcsim.cme import CmeParams
from qfcsim.core import LossSet, ThroughputBudget
from qfcsim.errors import QuadratureError, ValidationError
from qfcsim.noise import (
    EnrCurve,
    NoiseParams,
    enr_curve,
    initial_panel_count,
    noise_lossless,
    noise_lossy,
)

PINNED_ETA_NOR = 9.689147486591956
LENGTH_CM = 2.0

ORACLE_LOSSY_HZ = {
    0.005: 0.0097996051248463436,
    0.020: 0.029342428729328417,
    0.052: 0.04759909111383932,
    0.080: 0.062249945035374228,
}
ORACLE_LOSSLESS_HZ = {
    0.005: 0.0094221299009519673,
    0.020: 0.031773029269231812,
    0.052: 0.060711507134078368,
}
SMALL_P_SLOPE_LIMIT = 2.1688858873976279  # (e^{(a_p-a_d)L} - 1)/(a_p - a_d)


@pytest.fixture
def lossy_params():
    return NoiseParams(
        a_hz_per_w_per_cm=1.0,
        alpha_pump_per_cm=0.20,
        alpha_dfg_per_cm=0.12,
        eta_nor=PINNED_ETA_NOR,
        eta_int_max=0.93,
        length_cm=LENGTH_CM,
    )


@pytest.fixture
def lossless_params():
    return NoiseParams(
        a_hz_per_w_per_cm=1.0,
        alpha_pump_per_cm=0.0,
        alpha_dfg_per_cm=0.0,
        eta_nor=PINNED_ETA_NOR,
        eta_int_max=0.93,
        length_cm=LENGTH_CM,
    )


class TestAgainstQuadratureOracle:
    @pytest.mark.parametrize("p_w", sorted(ORACLE_LOSSY_HZ))
    def test_lossy_matches_oracle(self, p_w, lossy_params):
        assert noise_lossy(p_w, lossy_params) == pytest.approx(
            ORACLE_LOSSY_HZ[p_w], rel=1e-8
        )

    @pytest.mark.parametrize("p_w", sorted(ORACLE_LOSSLESS_HZ))
    def test_lossless_matches_oracle(self, p_w, lossless_params):
        assert noise_lossless(p_w, lossless_params) == pytest.approx(
            ORACLE_LOSSLESS_HZ[p_w], rel=1e-12
        )

    def test_small_power_slope_limit(self, lossy_params):
        got = noise_lossy(1e-8, lossy_params) / 1e-8
        assert got == pytest.approx(SMALL_P_SLOPE_LIMIT, rel=1e-6)

    def test_coefficient_scales_linearly(self, lossy_params):
        scaled = NoiseParams(
            a_hz_per_w_per_cm=1e4,
            alpha_pump_per_cm=0.20,
            alpha_dfg_per_cm=0.12,
            eta_nor=PINNED_ETA_NOR,
            eta_int_max=0.93,
            length_cm=LENGTH_CM,
        )
        assert noise_lossy(0.052, scaled) == pytest.approx(
            1e4 * noise_lossy(0.052, lossy_params), rel=1e-12
        )


class TestSignConventions:
    def test_attenuating_is_relabeled_printed_axis(self, lossy_params):
        attenuating = NoiseParams(
            a_hz_per_w_per_cm=1.0,
            alpha_pump_per_cm=0.20,
            alpha_dfg_per_cm=0.12,
            eta_nor=PINNED_ETA_NOR,
            eta_int_max=0.93,
            length_cm=LENGTH_CM,
            sign_convention="attenuating",
        )
        shrink = math.exp(-0.20 * LENGTH_CM)
        for p_w in (0.005, 0.020, 0.052, 0.080):
            assert noise_lossy(p_w, attenuating) == pytest.approx(
                noise_lossy(p_w * shrink, lossy_params), rel=1e-12
            )

    def test_unknown_convention_rejected(self):
        with pytest.raises(ValidationError):
            NoiseParams(1.0, 0.2, 0.12, 1.0, 0.93, 2.0, "growing")


class TestLosslessSeriesBranch:
    def test_continuous_across_branch_threshold(self, lossless_params):
        # The closed form switches to a series below 2kL = 1e-4; both sides
        # must agree with a 40-digit evaluation of the exact bracket.
        mp.mp.dps = 40
        k_cut = 1e-4 / (2.0 * LENGTH_CM)
        p_cut = k_cut**2 / PINNED_ETA_NOR
        for factor in (0.5, 0.98, 1.02, 2.0):
            p_w = p_cut * factor
            k = mp.sqrt(mp.mpf(PINNED_ETA_NOR) * mp.mpf(p_w))
            length = mp.mpf(LENGTH_CM)
            exact = float(
                mp.mpf(p_w)
                * (length - mp.mpf("0.93") * (length / 2 - mp.sin(2 * k * length) / (4 * k)))
            )
            assert noise_lossless(p_w, lossless_params) == pytest.approx(exact, rel=1e-10)

    def test_zero_power_gives_zero(self, lossless_params, lossy_params):
        assert noise_lossless(0.0, lossless_params) == 0.0
        assert noise_lossy(0.0, lossy_params) == 0.0


class TestAdaptiveQuadrature:
    def test_single_initial_panel_converges_to_same_value(self, lossy_params):
        default = noise_lossy(0.052, lossy_params)
        forced = noise_lossy(0.052, lossy_params, initial_panels=1)
        assert forced == pytest.approx(default, rel=1e-9)

    def test_initial_panel_count_tracks_oscillation(self, lossy_params):
        assert initial_panel_count(0.052, lossy_params) == 8  # floor dominates
        high = initial_panel_count(2.0, lossy_params)
        assert high > 8
        attenuating = NoiseParams(
            1.0, 0.20, 0.12, PINNED_ETA_NOR, 0.93, LENGTH_CM, "attenuating"
        )
        # The printed axis grows the pump toward u = L, so its worst-case
        # wavenumber (and panel count) is larger at the same power.
        assert high > initial_panel_count(2.0, attenuating)

    def test_nonpositive_initial_panels_rejected(self, lossy_params):
        with pytest.raises(ValidationError):
            noise_lossy(0.052, lossy_params, initial_panels=0)

    def test_exhausted_budget_raises_with_partial_estimate(self, lossy_params, monkeypatch):
        monkeypatch.setattr(noise_module, "MAX_PANEL_DOUBLINGS", 0)
        with pytest.raises(QuadratureError) as excinfo:
            noise_lossy(0.052, lossy_params)
        err = excinfo.value
        assert err.partial_estimate == pytest.approx(ORACLE_LOSSY_HZ[0.052], rel=1e-3)
        assert math.isinf(err.rel_change)

    def test_one_doubling_reports_finite_rel_change(self, lossy_params, monkeypatch):
        monkeypatch.setattr(noise_module, "MAX_PANEL_DOUBLINGS", 1)
        with pytest.raises(QuadratureError) as excinfo:
            noise_lossy(20.0, lossy_params, initial_panels=1)
        assert math.isfinite(excinfo.value.rel_change)
        assert excinfo.value.rel_change > noise_module.QUADRATURE_RTOL


class TestParameterValidation:
    def test_negative_coefficients_rejected(self):
        with pytest.raises(ValidationError):
            NoiseParams(-1.0, 0.2, 0.12, 1.0, 0.93, 2.0)
        with pytest.raises(ValidationError):
            NoiseParams(1.0, -0.2, 0.12, 1.0, 0.93, 2.0)
        with pytest.raises(ValidationError):
            NoiseParams(1.0, 0.2, 0.12, -1.0, 0.93, 2.0)

    def test_conversion_ceiling_capped_at_one(self):
        with pytest.raises(ValidationError):
            NoiseParams(1.0, 0.2, 0.12, 1.0, 1.2, 2.0)
        NoiseParams(1.0, 0.2, 0.12, 1.0, 1.0, 2.0)  # boundary allowed

    def test_nonpositive_length_rejected(self):
        with pytest.raises(ValidationError):
            NoiseParams(1.0, 0.2, 0.12, 1.0, 0.93, 0.0)

    def test_nonfinite_values_rejected(self):
        with pytest.raises(ValidationError):
            NoiseParams(math.nan, 0.2, 0.12, 1.0, 0.93, 2.0)
        with pytest.raises(ValidationError):
            NoiseParams(1.0, 0.2, 0.12, 1.0, 0.93, math.inf)

    def test_negative_power_rejected(self, lossy_params, lossless_params):
        with pytest.raises(ValidationError):
            noise_lossy(-0.01, lossy_params)
        with pytest.raises(ValidationError):
            noise_lossless(-0.01, lossless_params)


class TestEnrSweep:
    @pytest.fixture
    def sweep_inputs(self, bench_losses, lossy_params):
        cme_params = CmeParams(
            eta_nor=PINNED_ETA_NOR,
            losses=bench_losses,
            length_cm=LENGTH_CM,
            input_powers_w=(1e-6, 1.0),
        )
        budget = ThroughputBudget(0.49, 0.80, 0.79)
        return cme_params, budget

    def test_zero_power_point_has_no_ratio(self, lossy_params, sweep_inputs):
        cme_params, budget = sweep_inputs
        curve = enr_curve([0.0, 0.052], lossy_params, cme_params, budget)
        assert isinstance(curve, EnrCurve)
        first = curve.points[0]
        assert first.eta_ext == 0.0
        assert first.noise_hz == 0.0
        assert first.enr is None

    def test_external_efficiency_applies_budget_product(self, lossy_params, sweep_inputs):
        cme_params, budget = sweep_inputs
        curve = enr_curve([0.052], lossy_params, cme_params, budget)
        point = curve.points[0]
        product = 0.49 * 0.80 * 0.79
        assert point.eta_ext == pytest.approx(product * 1.1107757516432792, rel=1e-8)
        assert point.enr == pytest.approx(point.eta_ext / point.noise_hz, rel=1e-15)

    def test_argmax_fields_cover_both_maxima(self, lossy_params, sweep_inputs):
        cme_params, budget = sweep_inputs
        powers = [0.002 * i for i in range(1, 41)]
        curve = enr_curve(powers, lossy_params, cme_params, budget)
        assert curve.argmax_eta_ext_w == pytest.approx(0.052)
        assert curve.argmax_enr_w == pytest.approx(0.026)
        assert curve.points[curve.argmax_eta_ext_index].p_w == curve.argmax_eta_ext_w
        assert curve.points[curve.argmax_enr_index].p_w == curve.argmax_enr_w

    def test_all_zero_sweep_has_no_ratio_argmax(self, lossy_params, sweep_inputs):
        cme_params, budget = sweep_inputs
        curve = enr_curve([0.0], lossy_params, cme_params, budget)
        assert curve.argmax_enr_index is None
        assert curve.argmax_enr_w is None
        assert curve.argmax_eta_ext_index == 0

    def test_sweep_validation(self, lossy_params, sweep_inputs):
        cme_params, budget = sweep_inputs
        with pytest.raises(ValidationError):
            enr_curve([], lossy_params, cme_params, budget)
        with pytest.raises(ValidationError):
            enr_curve([-0.01], lossy_params, cme_params, budget)
