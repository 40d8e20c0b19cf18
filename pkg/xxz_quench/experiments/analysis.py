"""
Quench Analysis — Peak, onset, light-cone and symmetry measures of C_{i,i+1}(t).

These are the mechanical definitions used to compare runs against the
reference results:
- first peak: first local maximum with prominence ≥ 0.02 over the sampled series
- onset: first sampled time the series exceeds 0.05
- light cone: linear fit of onset time against distance from the centre bond
- mirror asymmetry: max over observations of |C_{i,i+1} − C_{N−i,N−i+1}|
- oscillation frequency: strongest non-zero periodogram line of the series
  after a given time, in cycles per unit time
"""

from __future__ import annotations

import csv
from collections.abc import Sequence
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.signal import find_peaks, periodogram
from scipy.stats import linregress

PEAK_PROMINENCE = 0.02
ONSET_THRESHOLD = 0.05
VANISH_THRESHOLD = 0.02


@dataclass(frozen=True)
class Peak:
    time: float
    value: float
    index: int


@dataclass(frozen=True)
class LightConeFit:
    slope: float
    intercept: float
    r_squared: float

    @property
    def velocity(self) -> float:
        """Bonds per unit time; infinite for a flat fit."""
        return float("inf") if self.slope == 0 else 1.0 / self.slope


def first_peak(
    times: Sequence[float], series: Sequence[float], prominence: float = PEAK_PROMINENCE
) -> Peak | None:
    """First local maximum of the series with at least the given prominence."""
    values = np.asarray(series, dtype=float)
    peaks, _ = find_peaks(values, prominence=prominence)
    if len(peaks) == 0:
        return None
    index = int(peaks[0])
    return Peak(time=float(times[index]), value=float(values[index]), index=index)


def onset_time(
    times: Sequence[float], series: Sequence[float], threshold: float = ONSET_THRESHOLD
) -> float | None:
    """First sampled time at which the series exceeds the threshold."""
    above = np.flatnonzero(np.asarray(series, dtype=float) > threshold)
    return float(times[above[0]]) if above.size else None


def light_cone_fit(distances: Sequence[float], onsets: Sequence[float]) -> LightConeFit:
    """
    Least-squares line onset = slope·distance + intercept.

    Raises:
        ValueError: With fewer than three points.
    """
    if len(distances) < 3:
        raise ValueError("A light-cone fit needs at least three onset times")
    result = linregress(np.asarray(distances, dtype=float), np.asarray(onsets, dtype=float))
    return LightConeFit(
        slope=float(result.slope),
        intercept=float(result.intercept),
        r_squared=float(result.rvalue**2),
    )


def light_cone_from_profiles(
    times: Sequence[float],
    concurrence: np.ndarray,
    bonds: Sequence[int],
    center: int,
    threshold: float = ONSET_THRESHOLD,
) -> LightConeFit:
    """
    Fit onset times of several 0-based bonds against |bond − center|.

    Raises:
        ValueError: If a bond never crosses the threshold.
    """
    distances, onsets = [], []
    for bond in bonds:
        onset = onset_time(times, concurrence[:, bond], threshold)
        if onset is None:
            raise ValueError(f"Bond {bond} never exceeds {threshold}")
        distances.append(abs(bond - center))
        onsets.append(onset)
    return light_cone_fit(distances, onsets)


def mirror_asymmetry(concurrence: np.ndarray) -> float:
    """Max |C_b − C_{n_bonds−1−b}| over all observations and bonds."""
    profiles = np.asarray(concurrence, dtype=float)
    return float(np.max(np.abs(profiles - profiles[:, ::-1]))) if profiles.size else 0.0


def late_time_mean(times: Sequence[float], series: Sequence[float], after: float) -> float:
    """Mean of the series over samples with time > after (nan if none)."""
    t = np.asarray(times, dtype=float)
    values = np.asarray(series, dtype=float)[t > after]
    return float(values.mean()) if values.size else float("nan")


def vanishes_after(
    times: Sequence[float],
    series: Sequence[float],
    after: float,
    threshold: float = VANISH_THRESHOLD,
) -> bool:
    """True when every sample with time > after lies below the threshold."""
    t = np.asarray(times, dtype=float)
    values = np.asarray(series, dtype=float)[t > after]
    return bool(np.all(values < threshold))


def fraction_above(
    times: Sequence[float],
    series: Sequence[float],
    after: float,
    threshold: float = VANISH_THRESHOLD,
) -> float:
    """Share of samples with time > after that exceed the threshold."""
    t = np.asarray(times, dtype=float)
    values = np.asarray(series, dtype=float)[t > after]
    return float(np.mean(values > threshold)) if values.size else 0.0


def dominant_frequency(
    times: Sequence[float], series: Sequence[float], after: float = 0.0
) -> float | None:
    """
    Frequency of the strongest oscillation of the series after a time.

    The samples must be uniformly spaced. The mean is removed before the
    periodogram is taken, so a constant series has no dominant frequency.

    Returns:
        Cycles per unit time, or None for fewer than four samples or a flat
        series.

    Raises:
        ValueError: If the sampling is not uniform.
    """
    t = np.asarray(times, dtype=float)
    mask = t > after
    t, values = t[mask], np.asarray(series, dtype=float)[mask]
    if t.size < 4 or np.ptp(values) == 0.0:
        return None
    steps = np.diff(t)
    if not np.allclose(steps, steps[0], rtol=1e-6, atol=1e-12):
        raise ValueError("dominant_frequency needs uniformly spaced samples")
    frequencies, power = periodogram(values, fs=1.0 / steps[0])
    if power[1:].max(initial=0.0) <= 0.0:
        return None
    return float(frequencies[1 + int(np.argmax(power[1:]))])


# ════════════════════════════════════════════════════════════════
# Reading runs back
# ════════════════════════════════════════════════════════════════


@dataclass(frozen=True)
class BondSummary:
    """Per-bond digest of a run; `bond` is the 1-based pair label i of C_{i,i+1}."""

    bond: int
    peak: Peak | None
    onset: float | None
    late_mean: float
    maximum: float
    frequency: float | None = None


def read_concurrence_csv(path: str | Path) -> tuple[np.ndarray, np.ndarray]:
    """
    Load a long-format concurrence.csv.

    Returns:
        (times, matrix [observation × bond]) with bonds in 0-based column order.
    """
    rows: list[tuple[float, int, float]] = []
    with Path(path).open(encoding="utf-8", newline="") as handle:
        reader = csv.reader(line for line in handle if not line.startswith("#"))
        header = next(reader)
        if header != ["time", "bond", "concurrence"]:
            raise ValueError(f"Unexpected concurrence.csv header {header}")
        for time, bond, value in reader:
            rows.append((float(time), int(bond), float(value)))

    times = np.array(sorted({r[0] for r in rows}))
    n_bonds = max(r[1] for r in rows) if rows else 0
    index = {t: k for k, t in enumerate(times)}
    matrix = np.zeros((len(times), n_bonds))
    for time, bond, value in rows:
        matrix[index[time], bond - 1] = value
    return times, matrix


def summarize_run(
    run_dir: str | Path, bonds: Sequence[int] | None = None, late_after: float | None = None
) -> list[BondSummary]:
    """
    Digest selected bonds (1-based pair labels) of a finished run directory.

    The late-time mean and the dominant frequency are taken over the second
    half of the run unless `late_after` is given.
    """
    times, matrix = read_concurrence_csv(Path(run_dir) / "concurrence.csv")
    labels = list(bonds) if bonds else list(range(1, matrix.shape[1] + 1))
    after = late_after if late_after is not None else (float(times[-1]) / 2 if len(times) else 0)
    summaries = []
    for label in labels:
        if not 1 <= label <= matrix.shape[1]:
            raise ValueError(f"Bond {label} outside 1..{matrix.shape[1]}")
        series = matrix[:, label - 1]
        summaries.append(
            BondSummary(
                bond=label,
                peak=first_peak(times, series),
                onset=onset_time(times, series),
                late_mean=late_time_mean(times, series, after),
                maximum=float(series.max()) if series.size else 0.0,
                frequency=dominant_frequency(times, series, after),
            )
        )
    return summaries
