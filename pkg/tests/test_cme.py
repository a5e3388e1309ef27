"""Coupled-mode integrator, closed-form efficiency models, and peak pinning.

Frozen reference values come from an independent adaptive integrator
(scipy DOP853 at rtol 1e-12, tools/oracles/cme_reference.py) evaluated on
the folded axis x = eta_nor * P2_out at the benchmark losses
(0.22, 0.20, 0.12) /cm and length 2 cm.
"""

import math

import numpy as np
import pytest

import qfcsim.cme as cme_module
from qfcsim.cme import (
    DEFAULT_SIGNAL_RATIO,
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
from qfcsim.core import LossSet
from qfcsim.errors import IntegrationError, ValidationError
from qfcsim.units import output_to_launched_power

LENGTH_CM = 2.0

# Independent-integrator values of eta_int on the folded axis.
ORACLE_ETA_BY_X = {
    0.1: 0.46079256280694,
    0.3: 0.9738915717303528,
}
ORACLE_X_PEAK = 0.5038356554001922
ORACLE_ETA_PEAK = 1.1107757516432792
ORACLE_PINNED_ETA_NOR = 9.689147219234465  # peak pinned to 52 mW output
ORACLE_LOW_CONVERSION_GAIN = 5.4400526772667896  # mpmath closed form


def eta_on_folded_axis(x, losses, eta_nor=1.0, signal_ratio=DEFAULT_SIGNAL_RATIO):
    """eta_int at output-referenced pump power P2_out = x / eta_nor."""
    p2_out = x / eta_nor
    p2_in = output_to_launched_power(p2_out, losses.alpha2_per_cm, LENGTH_CM)
    params = CmeParams(
        eta_nor=eta_nor,
        losses=losses,
        length_cm=LENGTH_CM,
        input_powers_w=(signal_ratio * p2_in, p2_in),
    )
    return internal_efficiency(params)


class TestAgainstIndependentIntegrator:
    @pytest.mark.parametrize("x", sorted(ORACLE_ETA_BY_X))
    def test_eta_matches_oracle_on_folded_axis(self, x, bench_losses):
        got = eta_on_folded_axis(x, bench_losses)
        assert got == pytest.approx(ORACLE_ETA_BY_X[x], rel=1e-8)

    def test_eta_at_peak_matches_oracle(self, bench_losses):
        got = eta_on_folded_axis(ORACLE_X_PEAK, bench_losses)
        assert got == pytest.approx(ORACLE_ETA_PEAK, rel=1e-9)

    def test_peak_exceeds_unity_with_asymmetric_losses(self, bench_losses):
        # alpha1 > alpha3: the pump-off signal reference decays faster than
        # the converted wave, so the output-referenced ratio tops 1.
        assert eta_on_folded_axis(ORACLE_X_PEAK, bench_losses) > 1.0

    def test_low_conversion_gain_matches_closed_form(self, bench_losses):
        got = low_conversion_gain(bench_losses, LENGTH_CM)
        assert got == pytest.approx(ORACLE_LOW_CONVERSION_GAIN, rel=1e-12)


class TestFoldedAxis:
    def test_efficiency_depends_only_on_eta_nor_times_p2(self, bench_losses):
        for x in (0.1, 0.3, 0.5):
            base = eta_on_folded_axis(x, bench_losses, eta_nor=1.0)
            scaled = eta_on_folded_axis(x, bench_losses, eta_nor=3.7)
            assert scaled == pytest.approx(base, rel=1e-12)

    def test_pin_eta_nor_to_peak(self, bench_losses):
        pinned = pin_eta_nor_to_peak(bench_losses, LENGTH_CM, 0.052)
        assert pinned == pytest.approx(ORACLE_PINNED_ETA_NOR, rel=1e-6)

    def test_pinned_curve_peaks_at_requested_power(self, bench_losses):
        pinned = pin_eta_nor_to_peak(bench_losses, LENGTH_CM, 0.052)
        out_factor = math.exp(-bench_losses.alpha2_per_cm * LENGTH_CM)

        def eta_at_out(p2_out):
            p2_in = p2_out / out_factor
            params = CmeParams(
                eta_nor=pinned,
                losses=bench_losses,
                length_cm=LENGTH_CM,
                input_powers_w=(DEFAULT_SIGNAL_RATIO * p2_in, p2_in),
            )
            return internal_efficiency(params)

        at_peak = eta_at_out(0.052)
        assert at_peak > eta_at_out(0.050)
        assert at_peak > eta_at_out(0.054)

    def test_pin_requires_positive_peak_power(self, bench_losses):
        with pytest.raises(ValidationError):
            pin_eta_nor_to_peak(bench_losses, LENGTH_CM, 0.0)


class TestLosslessLimit:
    def test_matches_sin2_closed_form(self):
        # Tiny signal ratio so pump depletion stays far below the tolerance.
        lossless = LossSet(0.0, 0.0, 0.0)
        for gl in (0.5, 1.0, math.pi / 2, 2.5, math.pi):
            p2 = (gl / LENGTH_CM) ** 2  # eta_nor = 1
            params = CmeParams(
                eta_nor=1.0,
                losses=lossless,
                length_cm=LENGTH_CM,
                input_powers_w=(1e-9 * p2, p2),
            )
            got = internal_efficiency(params)
            assert got == pytest.approx(eta_sin2(1.0, p2, LENGTH_CM), abs=1e-6)

    def test_symmetric_losses_preserve_unit_peak(self):
        # Equal signal and converted-wave losses with a lossless pump keep
        # the output-referenced peak at exactly 1.
        losses = LossSet(0.25, 0.0, 0.25)
        p2 = (math.pi / 2 / LENGTH_CM) ** 2
        params = CmeParams(
            eta_nor=1.0,
            losses=losses,
            length_cm=LENGTH_CM,
            input_powers_w=(1e-9 * p2, p2),
        )
        assert internal_efficiency(params) == pytest.approx(1.0, abs=1e-6)


class TestTrajectoryInvariants:
    def test_signal_photon_balance_under_depletion(self):
        # Lossless, equal inputs: each converted photon consumes one signal
        # photon, so N1 + N3 is constant along the guide.
        params = CmeParams(
            eta_nor=1.0,
            losses=LossSet(0.0, 0.0, 0.0),
            length_cm=LENGTH_CM,
            input_powers_w=(0.3, 0.3),
        )
        traj = integrate_cme(params)
        totals = np.array([s.fluxes[0] + s.fluxes[2] for s in traj])
        assert np.max(np.abs(totals - totals[0])) / totals[0] < 1e-9

    def test_pump_constant_at_small_signal(self):
        params = CmeParams(
            eta_nor=1.0,
            losses=LossSet(0.0, 0.0, 0.0),
            length_cm=LENGTH_CM,
            input_powers_w=(1e-6 * 0.3, 0.3),
        )
        traj = integrate_cme(params)
        pump = np.array([s.fluxes[1] for s in traj])
        assert np.max(np.abs(pump - pump[0])) / pump[0] < 2e-6

    def test_trajectory_spans_guide_and_is_sorted(self, bench_losses):
        params = CmeParams(
            eta_nor=9.69,
            losses=bench_losses,
            length_cm=LENGTH_CM,
            input_powers_w=(1e-6, 0.06),
        )
        traj = integrate_cme(params)
        assert isinstance(traj[0], CmeState)
        assert traj[0].z_cm == 0.0
        assert traj[-1].z_cm == pytest.approx(LENGTH_CM, rel=1e-12)
        zs = [s.z_cm for s in traj]
        assert zs == sorted(zs)
        assert traj[0].a3 == 0.0


class TestEfficiencyCurve:
    def test_zero_pump_gives_zero_efficiency(self, bench_losses):
        params = CmeParams(
            eta_nor=9.69,
            losses=bench_losses,
            length_cm=LENGTH_CM,
            input_powers_w=(1e-8, 0.01),
        )
        curve = internal_efficiency_curve(params, [0.0, 0.01])
        assert curve[0] == (0.0, 0.0)
        assert curve[1][0] == 0.01
        assert curve[1][1] > 0.0

    def test_negative_pump_rejected(self, bench_losses):
        params = CmeParams(
            eta_nor=9.69,
            losses=bench_losses,
            length_cm=LENGTH_CM,
            input_powers_w=(1e-8, 0.01),
        )
        with pytest.raises(ValidationError):
            internal_efficiency_curve(params, [-0.01])


class TestClosedForms:
    def test_eta_sin2_values(self):
        assert eta_sin2(1.0, (math.pi / 2) ** 2, 1.0) == pytest.approx(1.0, abs=1e-15)
        assert eta_sin2(1.0, 1.0, 1.0) == pytest.approx(math.sin(1.0) ** 2, rel=1e-15)
        assert eta_sin2(4.0, 0.25, 3.0) == pytest.approx(math.sin(3.0) ** 2, rel=1e-15)

    def test_eta_sin2_rejects_negative_inputs(self):
        with pytest.raises(ValidationError):
            eta_sin2(-1.0, 1.0, 1.0)

    def test_low_conversion_is_linear_in_output_pump(self, bench_losses):
        base = eta_low_conversion_lossy(8.39, 0.001, bench_losses, LENGTH_CM)
        assert eta_low_conversion_lossy(8.39, 0.003, bench_losses, LENGTH_CM) == pytest.approx(
            3.0 * base, rel=1e-14
        )

    def test_low_conversion_gain_zero_loss_limit(self):
        assert low_conversion_gain(LossSet(0.0, 0.0, 0.0), LENGTH_CM) == LENGTH_CM**2
        # Combined attenuation cancels when alpha3 = alpha1 + alpha2.
        assert low_conversion_gain(LossSet(0.1, 0.2, 0.3), LENGTH_CM) == LENGTH_CM**2

    def test_low_conversion_matches_integrator_at_small_power(self, bench_losses):
        # At x = 1e-4 the integrator sits within 0.02% of the linear model.
        x = 1e-4
        linear = x * ORACLE_LOW_CONVERSION_GAIN
        got = eta_on_folded_axis(x, bench_losses)
        assert got == pytest.approx(linear, rel=2e-4)


class TestValidationAndFailure:
    def test_zero_signal_power_rejected(self, bench_losses):
        params = CmeParams(
            eta_nor=1.0,
            losses=bench_losses,
            length_cm=LENGTH_CM,
            input_powers_w=(0.0, 0.01),
        )
        with pytest.raises(ValidationError):
            internal_efficiency(params)

    def test_negative_inputs_rejected(self, bench_losses):
        with pytest.raises(ValidationError):
            CmeParams(
                eta_nor=1.0,
                losses=bench_losses,
                length_cm=LENGTH_CM,
                input_powers_w=(-1e-6, 0.01),
            )
        with pytest.raises(ValidationError):
            CmeParams(
                eta_nor=-1.0,
                losses=bench_losses,
                length_cm=LENGTH_CM,
                input_powers_w=(1e-6, 0.01),
            )
        with pytest.raises(ValidationError):
            CmeParams(
                eta_nor=1.0,
                losses=bench_losses,
                length_cm=0.0,
                input_powers_w=(1e-6, 0.01),
            )

    def test_unreachable_tolerance_raises_with_last_endpoints(self, bench_losses, monkeypatch):
        monkeypatch.setattr(cme_module, "ENDPOINT_RTOL", 0.0)
        monkeypatch.setattr(cme_module, "MAX_REFINEMENTS", 2)
        params = CmeParams(
            eta_nor=9.69,
            losses=bench_losses,
            length_cm=LENGTH_CM,
            input_powers_w=(1e-6, 0.06),
        )
        with pytest.raises(IntegrationError) as excinfo:
            internal_efficiency(params)
        prev, last = excinfo.value.last_two_endpoints
        assert len(prev) == 3 and len(last) == 3
        assert prev != last
