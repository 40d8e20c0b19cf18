"""
Tests for quench analysis — peaks, onsets, light cones and run digests.
"""

from __future__ import annotations

import numpy as np
import pytest

from xxz_quench.experiments.analysis import (
    dominant_frequency,
    first_peak,
    fraction_above,
    late_time_mean,
    light_cone_fit,
    light_cone_from_profiles,
    mirror_asymmetry,
    onset_time,
    read_concurrence_csv,
    summarize_run,
    vanishes_after,
)
from xxz_quench.experiments.runner import run_quench
from xxz_quench.experiments.schema import QuenchConfig, QuenchProtocol


class TestSeriesMeasures:
    """Test measures of a single C(t) series."""

    def setup_method(self):
        self.times = np.linspace(0.0, 10.0, 101)
        self.series = 0.4 * np.exp(-((self.times - 2.0) ** 2)) + 0.1 * np.exp(
            -((self.times - 6.0) ** 2)
        )

    def test_first_peak(self):
        peak = first_peak(self.times, self.series)
        assert peak is not None
        assert peak.time == pytest.approx(2.0)
        assert peak.value == pytest.approx(0.4, abs=1e-3)

    def test_small_wiggles_are_not_peaks(self):
        flat = 0.005 * np.sin(self.times * 5)
        assert first_peak(self.times, flat) is None

    def test_onset(self):
        onset = onset_time(self.times, self.series)
        assert 0.0 < onset < 2.0
        assert self.series[self.times < onset].max() <= 0.05

    def test_onset_never_reached(self):
        assert onset_time(self.times, np.zeros_like(self.times)) is None

    def test_late_time_measures(self):
        assert late_time_mean(self.times, self.series, after=9.0) < 0.01
        assert vanishes_after(self.times, self.series, after=8.0)
        assert not vanishes_after(self.times, self.series, after=1.0)
        assert 0.0 < fraction_above(self.times, self.series, after=0.0) < 1.0

    def test_late_mean_without_samples(self):
        assert np.isnan(late_time_mean(self.times, self.series, after=100.0))


class TestDominantFrequency:
    """Test the periodogram frequency of a series."""

    def setup_method(self):
        self.times = np.linspace(0.0, 20.0, 201)

    def test_pure_oscillation(self):
        series = 0.3 + 0.1 * np.sin(2 * np.pi * 1.5 * self.times)
        assert dominant_frequency(self.times, series) == pytest.approx(1.5, abs=0.05)

    def test_stronger_line_wins(self):
        series = 0.05 * np.sin(2 * np.pi * 0.5 * self.times) + 0.2 * np.cos(
            2 * np.pi * 2.0 * self.times
        )
        assert dominant_frequency(self.times, series) == pytest.approx(2.0, abs=0.05)

    def test_only_samples_after_count(self):
        series = np.where(self.times > 10.0, np.sin(2 * np.pi * 3.0 * self.times), 0.0)
        assert dominant_frequency(self.times, series, after=10.0) == pytest.approx(3.0, abs=0.1)

    def test_flat_or_short_series(self):
        assert dominant_frequency(self.times, np.full_like(self.times, 0.2)) is None
        assert dominant_frequency(self.times[:3], [0.0, 0.1, 0.0]) is None

    def test_non_uniform_sampling_rejected(self):
        times = np.array([0.0, 0.1, 0.3, 0.4, 0.7])
        with pytest.raises(ValueError, match="uniformly"):
            dominant_frequency(times, [0.0, 1.0, 0.0, 1.0, 0.0])


class TestLightCone:
    """Test the onset-time line fit."""

    def test_exact_line(self):
        fit = light_cone_fit([0, 1, 2, 3, 4], [0.5, 0.75, 1.0, 1.25, 1.5])
        assert fit.slope == pytest.approx(0.25)
        assert fit.intercept == pytest.approx(0.5)
        assert fit.r_squared == pytest.approx(1.0)
        assert fit.velocity == pytest.approx(4.0)

    def test_needs_three_points(self):
        with pytest.raises(ValueError):
            light_cone_fit([0, 1], [0.0, 1.0])

    def test_from_profiles(self):
        times = np.linspace(0.0, 5.0, 51)
        bonds = range(2, 7)
        matrix = np.zeros((len(times), 9))
        for bond in bonds:
            arrival = 0.5 * abs(bond - 2) + 0.25
            matrix[:, bond] = np.where(times >= arrival, 0.2, 0.0)
        fit = light_cone_from_profiles(times, matrix, list(bonds), center=2)
        assert fit.slope == pytest.approx(0.5, abs=0.05)
        assert fit.r_squared > 0.95

    def test_silent_bond_rejected(self):
        times = np.linspace(0.0, 1.0, 11)
        with pytest.raises(ValueError, match="never exceeds"):
            light_cone_from_profiles(times, np.zeros((11, 4)), [0, 1, 2], center=0)


class TestMirrorAsymmetry:
    """Test the reflection measure."""

    def test_symmetric_profile(self):
        profiles = np.array([[0.1, 0.2, 0.1], [0.0, 0.3, 0.0]])
        assert mirror_asymmetry(profiles) == 0.0

    def test_asymmetric_profile(self):
        profiles = np.array([[0.1, 0.2, 0.4]])
        assert mirror_asymmetry(profiles) == pytest.approx(0.3)


class TestRunDigest:
    """Test reading a finished run back."""

    def test_round_trip_through_csv(self, tmp_path):
        config = QuenchConfig(protocol=QuenchProtocol.DOMAIN_WALL, n_sites=6, j_z=0.0,
                              dt=0.05, t_max=1.0, observe_stride=2, output_dir=tmp_path)
        result = run_quench(config)
        times, matrix = read_concurrence_csv(tmp_path / "concurrence.csv")
        np.testing.assert_allclose(times, result.record.times)
        np.testing.assert_allclose(matrix, result.record.concurrence, atol=1e-14)

        summaries = summarize_run(tmp_path, bonds=[3])
        assert len(summaries) == 1
        assert summaries[0].bond == 3
        assert summaries[0].maximum == pytest.approx(matrix[:, 2].max())

    def test_unknown_bond(self, tmp_path):
        config = QuenchConfig(n_sites=4, dt=0.05, t_max=0.1, output_dir=tmp_path)
        run_quench(config)
        with pytest.raises(ValueError, match="outside"):
            summarize_run(tmp_path, bonds=[4])
