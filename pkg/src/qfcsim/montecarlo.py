"""Stochastic defect-map generation and yield statistics.

Defect positions are uniform over the waveguide length and widths are
Poisson-distributed integers in um. Every trial owns an independent,
counter-derived random substream, so results are bit-identical for any
worker count and any chunking of the trial range.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import defects as dm
from .core import WaveguideSpec
from .errors import ValidationError

#: Trials below this make the normal-approximation confidence interval
#: untrustworthy; the yield entry points refuse to run with fewer.
MIN_TRIALS_FOR_CI = 100

_CHUNK_TARGET = 4096  # approximate (trials x segments) workload per chunk


@dataclass(frozen=True)
class WidthDistribution:
    """Distribution of defect widths; only Poisson widths in um exist today."""

    mean_um: float
    kind: str = "poisson_um"

    def __post_init__(self):
        if self.kind != "poisson_um":
            raise ValidationError(f"unsupported width distribution kind {self.kind!r}")
        if self.mean_um <= 0:
            raise ValidationError(f"mean_um must be positive, got {self.mean_um}")


@dataclass(frozen=True)
class McConfig:
    """Trial count, master seed, and the success criterion of a yield run."""

    trials: int
    seed: int
    threshold: float = 0.9
    mode: str = "peak_in_window"

    def __post_init__(self):
        if self.trials < 1:
            raise ValidationError(f"trials must be at least 1, got {self.trials}")
        if not 0.0 < self.threshold <= 1.0:
            raise ValidationError(f"threshold must lie in (0, 1], got {self.threshold}")
        if self.mode not in dm.MODES:
            raise ValidationError(f"mode must be one of {dm.MODES}, got {self.mode!r}")
        if self.seed < 0:
            raise ValidationError(f"seed must be a nonnegative integer, got {self.seed}")


@dataclass(frozen=True)
class YieldResult:
    """Success probability with its normal-approximation 95 % interval."""

    p_hat: float
    ci_lo: float
    ci_hi: float
    trials: int
    zero_width_draws: int


def trial_stream(seed: int, trial: int) -> np.random.Generator:
    """Independent random substream for one trial of one master seed."""
    seq = np.random.SeedSequence(entropy=seed, spawn_key=(trial,))
    return np.random.Generator(np.random.PCG64(seq))


def _draw_positions(stream: np.random.Generator, n: int, length_um: float) -> np.ndarray:
    positions = stream.uniform(0.0, length_um, size=n)
    # Exact duplicates are measure-zero but must be handled deterministically:
    # redraw only the colliding entries, preserving the stream order.
    while True:
        _, first_idx = np.unique(positions, return_index=True)
        if first_idx.size == n:
            return positions
        dup_mask = np.ones(n, dtype=bool)
        dup_mask[first_idx] = False
        positions[dup_mask] = stream.uniform(0.0, length_um, size=int(dup_mask.sum()))


def sample_defect_map(
    spec: WaveguideSpec,
    n_defects: int,
    dist: WidthDistribution,
    stream: np.random.Generator,
) -> dm.DefectMap:
    """Draw one random defect map: sorted uniform positions, Poisson widths.

    Positions are drawn first, deduplicated, and sorted; widths are drawn
    afterwards, one per (sorted) position. Zero-width draws are kept
    as-sampled; they act as full phase flips after principal-value reduction.
    """
    if n_defects < 0:
        raise ValidationError(f"n_defects must be nonnegative, got {n_defects}")
    if n_defects == 0:
        return dm.DefectMap()
    positions = np.sort(_draw_positions(stream, n_defects, spec.length_um))
    widths = stream.poisson(dist.mean_um, size=n_defects).astype(float)
    return dm.DefectMap(tuple(zip(positions.tolist(), widths.tolist())))


def _relative_efficiencies_chunk(
    spec: WaveguideSpec,
    n_defects: int,
    dist: WidthDistribution,
    seed: int,
    trial_lo: int,
    trial_hi: int,
    mode: str,
) -> tuple[np.ndarray, int]:
    """Relative efficiencies for trials [trial_lo, trial_hi); batched."""
    batch = trial_hi - trial_lo
    length_um = spec.length_um
    positions = np.empty((batch, n_defects))
    widths = np.empty((batch, n_defects))
    for i in range(batch):
        stream = trial_stream(seed, trial_lo + i)
        positions[i] = np.sort(_draw_positions(stream, n_defects, length_um))
        widths[i] = stream.poisson(dist.mean_um, size=n_defects).astype(float)
    zero_widths = int(np.count_nonzero(widths == 0.0))
    steps = dm.phase_shift(widths, spec.poling_period_um)

    _, peak = dm.ideal_peak(spec)
    if mode == "at_nominal_q":
        q_nominal = np.full(batch, 1.0 / spec.poling_period_um)
        amp = dm._batch_amplitudes(
            positions, steps, q_nominal, spec.poling_period_um, length_um,
            spec.d_eff, per_row=True,
        )
        return np.abs(amp) ** 2 / peak, zero_widths
    best = dm.batch_peak_abs2(positions, steps, spec)
    return best / peak, zero_widths


def relative_efficiency_samples(
    spec: WaveguideSpec,
    n_defects: int,
    dist: WidthDistribution,
    cfg: McConfig,
    workers: int = 1,
) -> tuple[np.ndarray, int]:
    """All per-trial relative efficiencies plus the zero-width draw count.

    The trial axis is split into fixed chunks; with ``workers > 1`` the chunks
    run on a thread pool and are written back by trial index, so the result is
    identical to the serial run.
    """
    if n_defects == 0:
        return np.ones(cfg.trials), 0
    chunk = max(16, _CHUNK_TARGET // (n_defects + 2))
    bounds = [(lo, min(lo + chunk, cfg.trials)) for lo in range(0, cfg.trials, chunk)]
    rel = np.empty(cfg.trials)
    zero_total = 0

    def run(bound):
        lo, hi = bound
        return lo, hi, _relative_efficiencies_chunk(
            spec, n_defects, dist, cfg.seed, lo, hi, cfg.mode
        )

    if workers > 1 and len(bounds) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            for lo, hi, (vals, zeros) in pool.map(run, bounds):
                rel[lo:hi] = vals
                zero_total += zeros
    else:
        for bound in bounds:
            lo, hi, (vals, zeros) = run(bound)
            rel[lo:hi] = vals
            zero_total += zeros
    return rel, zero_total


def _binomial_ci(p_hat: float, trials: int) -> tuple[float, float]:
    half = 1.96 * float(np.sqrt(p_hat * (1.0 - p_hat) / trials))
    return p_hat - half, p_hat + half


def run_yield(
    spec: WaveguideSpec,
    n_defects: int,
    dist: WidthDistribution,
    cfg: McConfig,
    workers: int = 1,
) -> YieldResult:
    """Full yield estimate for one defect count, with metadata."""
    if cfg.trials < MIN_TRIALS_FOR_CI:
        raise ValidationError(
            f"at least {MIN_TRIALS_FOR_CI} trials are required for a meaningful "
            f"confidence interval, got {cfg.trials}"
        )
    rel, zero_widths = relative_efficiency_samples(spec, n_defects, dist, cfg, workers)
    p_hat = float(np.count_nonzero(rel >= cfg.threshold) / cfg.trials)
    lo, hi = _binomial_ci(p_hat, cfg.trials)
    return YieldResult(p_hat, lo, hi, cfg.trials, zero_widths)


def success_probability(
    spec: WaveguideSpec,
    n_defects: int,
    dist: WidthDistribution,
    cfg: McConfig,
    workers: int = 1,
) -> tuple[float, tuple[float, float]]:
    """Probability that the relative efficiency reaches the success threshold.

    Returns (p_hat, (ci_lo, ci_hi)) with a 95 % normal-approximation interval.
    """
    result = run_yield(spec, n_defects, dist, cfg, workers)
    return result.p_hat, (result.ci_lo, result.ci_hi)


def efficiency_distribution(
    spec: WaveguideSpec,
    n_defects: int,
    dist: WidthDistribution,
    cfg: McConfig,
    bins: int,
    workers: int = 1,
) -> tuple[np.ndarray, np.ndarray]:
    """Normalized histogram of relative efficiency over [0, 1].

    Returns (bin_edges, masses) with masses summing to 1. Samples above 1
    (possible only through rounding) land in the top bin.
    """
    if bins < 2:
        raise ValidationError(f"bins must be at least 2, got {bins}")
    rel, _ = relative_efficiency_samples(spec, n_defects, dist, cfg, workers)
    edges = np.linspace(0.0, 1.0, bins + 1)
    counts, _ = np.histogram(np.clip(rel, 0.0, 1.0), bins=edges)
    return edges, counts / cfg.trials


def probability_vs_length(
    spec: WaveguideSpec,
    n_defects: int,
    lengths_cm: list[float],
    dist: WidthDistribution,
    cfg: McConfig,
    workers: int = 1,
) -> list[tuple[float, float, tuple[float, float]]]:
    """Success probability across waveguide lengths, sharing the master seed.

    The template spec supplies the poling period, nonlinearity scale, and
    wavelengths; only the length varies.
    """
    out = []
    for length_cm in lengths_cm:
        if length_cm <= 0:
            raise ValidationError(f"lengths must be positive, got {length_cm}")
        spec_l = WaveguideSpec(
            length_cm=length_cm,
            poling_period_um=spec.poling_period_um,
            d_eff=spec.d_eff,
            wavelengths_nm=spec.wavelengths_nm,
        )
        p_hat, ci = success_probability(spec_l, n_defects, dist, cfg, workers)
        out.append((length_cm, p_hat, ci))
    return out
