"""Random defect-map sampling and yield statistics."""

import numpy as np
import pytest

from qfcsim.core import WaveguideSpec
from qfcsim.errors import ValidationError
from qfcsim.montecarlo import (
    McConfig,
    WidthDistribution,
    YieldResult,
    efficiency_distribution,
    probability_vs_length,
    relative_efficiency_samples,
    run_yield,
    sample_defect_map,
    success_probability,
    trial_stream,
)

SPEC = WaveguideSpec(length_cm=2.0, poling_period_um=3.07)
DIST = WidthDistribution(mean_um=12.3)


def test_trial_streams_are_reproducible_and_independent():
    a = trial_stream(42, 7).uniform(size=5)
    b = trial_stream(42, 7).uniform(size=5)
    c = trial_stream(42, 8).uniform(size=5)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)


def test_sample_defect_map_shape_and_order():
    stream = trial_stream(3, 0)
    defects = sample_defect_map(SPEC, 5, DIST, stream)
    positions = defects.positions_um
    assert defects.count == 5
    assert np.all(np.diff(positions) > 0)
    assert np.all(defects.widths_um >= 0)
    assert np.all(defects.widths_um == np.floor(defects.widths_um))  # integer um draws


def test_sample_defect_map_zero_defects():
    assert sample_defect_map(SPEC, 0, DIST, trial_stream(3, 0)).count == 0
    with pytest.raises(ValidationError):
        sample_defect_map(SPEC, -1, DIST, trial_stream(3, 0))


def test_zero_defects_always_succeed():
    result = run_yield(SPEC, 0, DIST, McConfig(trials=150, seed=1))
    assert result.p_hat == 1.0
    assert result.zero_width_draws == 0


def test_worker_count_does_not_change_samples():
    cfg = McConfig(trials=400, seed=11)
    serial, zeros_serial = relative_efficiency_samples(SPEC, 2, DIST, cfg, workers=1)
    pooled, zeros_pooled = relative_efficiency_samples(SPEC, 2, DIST, cfg, workers=4)
    assert np.array_equal(serial, pooled)
    assert zeros_serial == zeros_pooled


def test_minimum_trial_count_enforced():
    with pytest.raises(ValidationError):
        run_yield(SPEC, 1, DIST, McConfig(trials=99, seed=0))


def test_confidence_interval_formula():
    result = run_yield(SPEC, 1, DIST, McConfig(trials=500, seed=5))
    half = 1.96 * np.sqrt(result.p_hat * (1.0 - result.p_hat) / result.trials)
    assert result.ci_lo == pytest.approx(result.p_hat - half, abs=1e-12)
    assert result.ci_hi == pytest.approx(result.p_hat + half, abs=1e-12)
    assert isinstance(result, YieldResult)


def test_success_probability_wraps_run_yield():
    p, (lo, hi) = success_probability(SPEC, 1, DIST, McConfig(trials=300, seed=9))
    result = run_yield(SPEC, 1, DIST, McConfig(trials=300, seed=9))
    assert (p, lo, hi) == (result.p_hat, result.ci_lo, result.ci_hi)


def test_zero_width_draws_are_counted():
    narrow = WidthDistribution(mean_um=0.2)  # Poisson(0.2): most draws are 0
    result = run_yield(SPEC, 2, narrow, McConfig(trials=150, seed=2))
    assert result.zero_width_draws > 0


def test_efficiency_distribution_masses():
    edges, masses = efficiency_distribution(SPEC, 1, DIST, McConfig(trials=200, seed=3), bins=10)
    assert edges[0] == 0.0 and edges[-1] == 1.0
    assert masses.sum() == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(ValidationError):
        efficiency_distribution(SPEC, 1, DIST, McConfig(trials=200, seed=3), bins=1)


def test_probability_vs_length_shares_seed_and_validates():
    rows = probability_vs_length(SPEC, 1, [1.0, 2.0], DIST, McConfig(trials=200, seed=4))
    assert [row[0] for row in rows] == [1.0, 2.0]
    direct = success_probability(
        WaveguideSpec(length_cm=1.0, poling_period_um=3.07), 1, DIST, McConfig(trials=200, seed=4)
    )
    assert rows[0][1] == direct[0]
    with pytest.raises(ValidationError):
        probability_vs_length(SPEC, 1, [0.0], DIST, McConfig(trials=200, seed=4))


def test_config_validation():
    with pytest.raises(ValidationError):
        McConfig(trials=0, seed=1)
    with pytest.raises(ValidationError):
        McConfig(trials=100, seed=-1)
    with pytest.raises(ValidationError):
        McConfig(trials=100, seed=1, threshold=0.0)
    with pytest.raises(ValidationError):
        McConfig(trials=100, seed=1, mode="bogus")
    with pytest.raises(ValidationError):
        WidthDistribution(mean_um=0.0)
    with pytest.raises(ValidationError):
        WidthDistribution(mean_um=1.0, kind="uniform")
