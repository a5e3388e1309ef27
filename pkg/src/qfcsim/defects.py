"""Defect-perturbed nonlinear coefficient profile and its Fourier picture.

The poled nonlinearity is modeled as d(z) = d_eff * sin(2*pi*z/period) with a
piecewise-constant phase factor exp(i*Phi(z)): each domain defect of width w
at position x adds a step phi = (2*pi/period)*(w - period/2), reduced to
(-pi, pi], to the cumulative phase Phi for all z beyond x. Conversion
efficiency at spatial frequency q is proportional to |A(q)|^2 with

    A(q, z_end) = integral_0^z_end d(z) * exp(-2j*pi*q*z) dz.

Lengths inside this module are micrometers and q is in um^-1; the amplitude
returned by :func:`amplitude_integral` therefore carries um units, which
cancel in every relative quantity.

The integral is evaluated segment by segment in closed form: with the sine
carrier expanded into complex exponentials, each segment contributes two
terms of the form integral exp(i*K*z) dz, computed stably for every K
(including K -> 0) as (b-a) * exp(i*K*(a+b)/2) * sinc(K*(b-a)/2).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .core import WaveguideSpec
from .errors import ValidationError
from .units import cm_to_um

#: Half-width of the spatial-frequency search window around the nominal
#: phase-matching point, in units of 1/L: q in [1/period - 10/L, 1/period + 10/L].
PEAK_WINDOW_IN_LOBE_UNITS = 10.0

#: Points of the dense scan that precedes golden-section refinement.
PEAK_SCAN_POINTS = 512

MODES = ("at_nominal_q", "peak_in_window")

_INVPHI = (np.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class DefectMap:
    """Ordered list of domain defects as (position_um, width_um) pairs.

    Positions must be strictly increasing and widths nonnegative. The map is
    geometry-agnostic; position bounds against a specific waveguide length are
    checked by the operations that pair a map with a :class:`WaveguideSpec`.
    """

    defects: tuple[tuple[float, float], ...] = ()

    def __post_init__(self):
        prev = -np.inf
        for i, (pos, width) in enumerate(self.defects):
            if pos <= prev:
                raise ValidationError(
                    f"defect positions must be strictly increasing; entry {i} "
                    f"has position {pos} after {prev}"
                )
            if pos < 0:
                raise ValidationError(f"defect position must be nonnegative, got {pos}")
            if width < 0:
                raise ValidationError(f"defect width must be nonnegative, got {width}")
            prev = pos

    @classmethod
    def from_lists(cls, positions_um, widths_um) -> "DefectMap":
        if len(positions_um) != len(widths_um):
            raise ValidationError(
                f"positions and widths differ in length: {len(positions_um)} vs {len(widths_um)}"
            )
        return cls(tuple(zip(map(float, positions_um), map(float, widths_um))))

    @property
    def count(self) -> int:
        return len(self.defects)

    @property
    def positions_um(self) -> np.ndarray:
        return np.array([p for p, _ in self.defects], dtype=float)

    @property
    def widths_um(self) -> np.ndarray:
        return np.array([w for _, w in self.defects], dtype=float)


@dataclass(frozen=True)
class PhaseProfile:
    """Piecewise-constant cumulative phase Phi(z) of the defect sequence.

    ``breakpoints`` holds (z_um, cumulative_phase_rad) pairs: the phase is 0
    before the first breakpoint and equals the listed cumulative value from
    each breakpoint onward. Individual steps are the per-defect phases reduced
    to (-pi, pi]; the running sum itself is not re-reduced.
    """

    breakpoints: tuple[tuple[float, float], ...]


@dataclass(frozen=True)
class TuningCurve:
    """Relative conversion efficiency versus spatial frequency q (um^-1)."""

    q_values: tuple[float, ...]
    relative_eta: tuple[float, ...]

    def __post_init__(self):
        if len(self.q_values) != len(self.relative_eta):
            raise ValidationError("q_values and relative_eta must have the same length")
        if any(v < 0 for v in self.relative_eta):
            raise ValidationError("relative_eta values must be nonnegative")


def phase_shift(width_um, poling_period_um):
    """Phase step of one defect, reduced to the principal range (-pi, pi].

    A width of exactly half a period produces no step; a full-period defect
    produces +pi (a sign flip of the downstream nonlinearity). Accepts scalars
    or arrays.
    """
    if poling_period_um <= 0:
        raise ValidationError(f"poling_period_um must be positive, got {poling_period_um}")
    width = np.asarray(width_um, dtype=float)
    if np.any(width < 0):
        raise ValidationError("defect widths must be nonnegative")
    raw = 2.0 * np.pi * (width / poling_period_um - 0.5)
    reduced = np.mod(raw, 2.0 * np.pi)
    reduced = np.where(reduced > np.pi, reduced - 2.0 * np.pi, reduced)
    if np.isscalar(width_um):
        return float(reduced)
    return reduced


def phase_profile(defects: DefectMap, poling_period_um: float) -> PhaseProfile:
    """Cumulative phase profile implied by a defect map."""
    if defects.count == 0:
        return PhaseProfile(())
    steps = phase_shift(defects.widths_um, poling_period_um)
    cumulative = np.cumsum(steps)
    return PhaseProfile(tuple(zip(defects.positions_um.tolist(), cumulative.tolist())))


def _exp_integral(k, a, b):
    """integral_a^b exp(i*k*z) dz, stable for every k including k = 0.

    Arguments broadcast; sinc handles the k -> 0 limit exactly.
    """
    span = b - a
    mid = 0.5 * (a + b)
    return span * np.exp(1j * k * mid) * np.sinc(k * span / (2.0 * np.pi))


def _segment_edges(positions_um: np.ndarray, z_end_um) -> np.ndarray:
    """Segment edges for a batch of maps, clipped to the integration end.

    positions_um has shape (B, n) with each row sorted; returns edges of shape
    (B, n+2). Defects at or beyond z_end collapse into zero-length segments,
    which contribute nothing to the integral.
    """
    batch = positions_um.shape[0]
    z_end = np.broadcast_to(np.asarray(z_end_um, dtype=float), (batch,))
    clipped = np.minimum(positions_um, z_end[:, None])
    return np.concatenate([np.zeros((batch, 1)), clipped, z_end[:, None]], axis=1)


def _batch_amplitudes(
    positions_um: np.ndarray,
    phase_steps: np.ndarray,
    q_per_um: np.ndarray,
    period_um: float,
    z_end_um,
    d_eff: float = 1.0,
    per_row: bool = False,
) -> np.ndarray:
    """Amplitudes A(q) for a batch of defect maps sharing a defect count.

    Parameters
    ----------
    positions_um : (B, n) sorted defect positions.
    phase_steps : (B, n) reduced per-defect phase steps.
    q_per_um : spatial frequencies; with ``per_row=False`` a (Q,) grid is
        evaluated for every map and the result has shape (B, Q), with
        ``per_row=True`` a (B,) vector is evaluated elementwise giving (B,).
    """
    edges = _segment_edges(positions_um, z_end_um)
    a = edges[:, :-1]  # (B, S)
    b = edges[:, 1:]
    cum = np.concatenate(
        [np.zeros((positions_um.shape[0], 1)), np.cumsum(phase_steps, axis=1)], axis=1
    )  # (B, S)
    seg_phase = np.exp(1j * cum)

    k_carrier = 2.0 * np.pi / period_um
    q = np.asarray(q_per_um, dtype=float)

    if per_row:
        k1 = k_carrier - 2.0 * np.pi * q[:, None]  # (B, 1) broadcast over segments
        k2 = -k_carrier - 2.0 * np.pi * q[:, None]
        i1 = _exp_integral(k1, a, b)
        i2 = _exp_integral(k2, a, b)
        amp = np.sum(seg_phase * (i1 - i2), axis=1) / 2j
        return d_eff * amp  # (B,)

    k1 = k_carrier - 2.0 * np.pi * q  # (Q,)
    k2 = -k_carrier - 2.0 * np.pi * q
    i1 = _exp_integral(k1[None, None, :], a[:, :, None], b[:, :, None])  # (B, S, Q)
    i2 = _exp_integral(k2[None, None, :], a[:, :, None], b[:, :, None])
    amp = np.einsum("bs,bsq->bq", seg_phase, i1 - i2) / 2j
    return d_eff * amp  # (B, Q)


def _validate_map_in_spec(spec: WaveguideSpec, defects: DefectMap) -> None:
    length_um = spec.length_um
    for pos, _ in defects.defects:
        if pos > length_um:
            raise ValidationError(
                f"defect position {pos} um lies beyond the {length_um:.1f} um waveguide"
            )


def amplitude_integral(
    spec: WaveguideSpec, defects: DefectMap, q_per_um: float, z_end_cm: float
) -> complex:
    """Conversion amplitude A(q, z_end), in um, for one defect map.

    q is the spatial frequency of the phase mismatch in um^-1 and must be
    positive (it is the magnitude of the grating order being matched).
    Integration runs from the input facet to ``z_end_cm``.
    """
    if q_per_um <= 0:
        raise ValidationError(f"q_per_um must be positive, got {q_per_um}")
    z_end_um = cm_to_um(z_end_cm)
    if not 0.0 <= z_end_um <= spec.length_um + 1e-9:
        raise ValidationError(
            f"z_end_cm must lie within [0, {spec.length_cm}] cm, got {z_end_cm}"
        )
    _validate_map_in_spec(spec, defects)
    positions = defects.positions_um.reshape(1, -1)
    steps = phase_shift(defects.widths_um, spec.poling_period_um).reshape(1, -1)
    amp = _batch_amplitudes(
        positions, steps, np.array([q_per_um]), spec.poling_period_um, z_end_um, spec.d_eff
    )
    return complex(amp[0, 0])


def _scan_window(spec: WaveguideSpec) -> tuple[float, float]:
    q_nominal = 1.0 / spec.poling_period_um
    half = PEAK_WINDOW_IN_LOBE_UNITS / spec.length_um
    return q_nominal - half, q_nominal + half


def _golden_refine_batch(eval_abs2, lo: np.ndarray, hi: np.ndarray, iters: int = 60):
    """Vectorized golden-section maximization on per-row brackets."""
    a = lo.copy()
    b = hi.copy()
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc = eval_abs2(c)
    fd = eval_abs2(d)
    for _ in range(iters):
        left = fc > fd
        b = np.where(left, d, b)
        a = np.where(left, a, c)
        new_c = b - _INVPHI * (b - a)
        new_d = a + _INVPHI * (b - a)
        # One of the two interior points is inherited; only the other needs
        # a fresh evaluation, but evaluating both keeps the update branch-free
        # and the evaluation is vectorized anyway.
        fc = eval_abs2(new_c)
        fd = eval_abs2(new_d)
        c, d = new_c, new_d
    mid = 0.5 * (a + b)
    return mid, eval_abs2(mid)


def batch_peak_abs2(
    positions_um: np.ndarray,
    phase_steps: np.ndarray,
    spec: WaveguideSpec,
    scan_points: int = PEAK_SCAN_POINTS,
) -> np.ndarray:
    """Peak |A|^2 within the search window for a batch of defect maps.

    Dense scan over the window followed by golden-section refinement of the
    best bracket, per row. Used by the Monte Carlo engine; single maps go
    through the same path with a batch of one.
    """
    lo, hi = _scan_window(spec)
    grid = np.linspace(lo, hi, scan_points)
    z_end_um = spec.length_um
    abs2_grid = np.abs(
        _batch_amplitudes(positions_um, phase_steps, grid, spec.poling_period_um, z_end_um, spec.d_eff)
    ) ** 2  # (B, Q)
    best = np.argmax(abs2_grid, axis=1)
    bracket_lo = grid[np.maximum(best - 1, 0)]
    bracket_hi = grid[np.minimum(best + 1, scan_points - 1)]

    def eval_abs2(q_rows: np.ndarray) -> np.ndarray:
        amp = _batch_amplitudes(
            positions_um, phase_steps, q_rows, spec.poling_period_um, z_end_um,
            spec.d_eff, per_row=True,
        )
        return np.abs(amp) ** 2

    _, refined = _golden_refine_batch(eval_abs2, bracket_lo, bracket_hi)
    return np.maximum(refined, abs2_grid[np.arange(abs2_grid.shape[0]), best])


@lru_cache(maxsize=128)
def _ideal_peak_cached(length_um: float, period_um: float, d_eff: float) -> tuple[float, float]:
    lo = 1.0 / period_um - PEAK_WINDOW_IN_LOBE_UNITS / length_um
    hi = 1.0 / period_um + PEAK_WINDOW_IN_LOBE_UNITS / length_um
    grid = np.linspace(lo, hi, PEAK_SCAN_POINTS)
    empty_pos = np.empty((1, 0))
    empty_steps = np.empty((1, 0))
    abs2 = np.abs(
        _batch_amplitudes(empty_pos, empty_steps, grid, period_um, length_um, d_eff)
    ) ** 2
    best = int(np.argmax(abs2[0]))
    b_lo = np.array([grid[max(best - 1, 0)]])
    b_hi = np.array([grid[min(best + 1, PEAK_SCAN_POINTS - 1)]])

    def eval_abs2(q_rows):
        amp = _batch_amplitudes(
            empty_pos, empty_steps, q_rows, period_um, length_um, d_eff, per_row=True
        )
        return np.abs(amp) ** 2

    q_best, refined = _golden_refine_batch(eval_abs2, b_lo, b_hi)
    peak = max(float(refined[0]), float(abs2[0, best]))
    return float(q_best[0]), peak


def ideal_peak(spec: WaveguideSpec) -> tuple[float, float]:
    """(q_peak_per_um, peak_abs2_um2) of the defect-free waveguide."""
    return _ideal_peak_cached(spec.length_um, spec.poling_period_um, spec.d_eff)


def tuning_curve(
    spec: WaveguideSpec,
    defects: DefectMap,
    q_min_per_um: float,
    q_max_per_um: float,
    num_points: int,
) -> TuningCurve:
    """Relative-efficiency tuning curve over [q_min, q_max].

    Values are normalized to the peak of the defect-free curve, so an empty
    map produces a curve whose maximum is 1 at the phase-matching point.
    """
    if not q_min_per_um < q_max_per_um:
        raise ValidationError(f"q_min must be below q_max, got {q_min_per_um} >= {q_max_per_um}")
    if num_points < 2:
        raise ValidationError(f"num_points must be at least 2, got {num_points}")
    if q_min_per_um <= 0:
        raise ValidationError(f"q_min must be positive, got {q_min_per_um}")
    _validate_map_in_spec(spec, defects)
    _, peak = ideal_peak(spec)
    grid = np.linspace(q_min_per_um, q_max_per_um, num_points)
    positions = defects.positions_um.reshape(1, -1)
    steps = phase_shift(defects.widths_um, spec.poling_period_um).reshape(1, -1)
    abs2 = np.abs(
        _batch_amplitudes(positions, steps, grid, spec.poling_period_um, spec.length_um, spec.d_eff)
    )[0] ** 2
    return TuningCurve(tuple(grid.tolist()), tuple((abs2 / peak).tolist()))


def efficiency_evolution(
    spec: WaveguideSpec, defects: DefectMap, q_per_um: float, num_points: int
) -> list[tuple[float, float]]:
    """Relative efficiency |A(q, z)|^2 accumulated along the waveguide.

    Samples a uniform z grid augmented with every defect position, so the
    abrupt phase steps are visible in the returned curve. Normalization is
    the defect-free peak at full length, making the final sample directly
    comparable with :func:`relative_efficiency`.
    """
    if num_points < 2:
        raise ValidationError(f"num_points must be at least 2, got {num_points}")
    if q_per_um <= 0:
        raise ValidationError(f"q_per_um must be positive, got {q_per_um}")
    _validate_map_in_spec(spec, defects)
    length_um = spec.length_um
    z_grid = np.linspace(0.0, length_um, num_points)
    inside = defects.positions_um
    inside = inside[(inside > 0) & (inside < length_um)]
    z_all = np.unique(np.concatenate([z_grid, inside]))

    _, peak = ideal_peak(spec)
    positions = defects.positions_um.reshape(1, -1)
    steps = phase_shift(defects.widths_um, spec.poling_period_um).reshape(1, -1)
    out = []
    for z_um in z_all:
        amp = _batch_amplitudes(
            positions, steps, np.array([q_per_um]), spec.poling_period_um, z_um, spec.d_eff
        )[0, 0]
        out.append((float(z_um) / 1.0e4, float(abs(amp) ** 2 / peak)))
    return out


def relative_efficiency(
    spec: WaveguideSpec, defects: DefectMap, mode: str = "peak_in_window"
) -> float:
    """Conversion efficiency of a defect map relative to the defect-free peak.

    ``at_nominal_q`` evaluates at the nominal phase-matching frequency
    q = 1/period; ``peak_in_window`` (default) reports the best efficiency
    reachable within the +-10/L search window, reflecting that the operating
    point is re-centered (via temperature) in practice.
    """
    if mode not in MODES:
        raise ValidationError(f"mode must be one of {MODES}, got {mode!r}")
    _validate_map_in_spec(spec, defects)
    _, peak = ideal_peak(spec)
    positions = defects.positions_um.reshape(1, -1)
    steps = phase_shift(defects.widths_um, spec.poling_period_um).reshape(1, -1)
    if mode == "at_nominal_q":
        q_nominal = 1.0 / spec.poling_period_um
        amp = _batch_amplitudes(
            positions, steps, np.array([q_nominal]), spec.poling_period_um,
            spec.length_um, spec.d_eff,
        )[0, 0]
        return float(abs(amp) ** 2 / peak)
    best = batch_peak_abs2(positions, steps, spec)
    return float(best[0] / peak)


def curve_fwhm(curve: TuningCurve) -> float | None:
    """Full width at half maximum of a tuning curve, by linear interpolation.

    Returns None when the curve does not fall below half of its maximum on
    both sides within the sampled range (the width is then not measurable
    from the data).
    """
    qs = np.asarray(curve.q_values)
    vals = np.asarray(curve.relative_eta)
    i_peak = int(np.argmax(vals))
    half = vals[i_peak] / 2.0
    if vals[i_peak] <= 0.0:
        return None

    def crossing(indices) -> float | None:
        prev = i_peak
        for j in indices:
            if vals[j] < half:
                frac = (half - vals[j]) / (vals[prev] - vals[j])
                return float(qs[j] + frac * (qs[prev] - qs[j]))
            prev = j
        return None

    left = crossing(range(i_peak - 1, -1, -1))
    right = crossing(range(i_peak + 1, len(vals)))
    if left is None or right is None:
        return None
    return right - left
