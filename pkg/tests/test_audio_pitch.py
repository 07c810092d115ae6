"""Pitch tracking, jitter, shimmer, and harmonicity against known synthesis."""

import numpy as np
import pytest

from convometrics import synth
from convometrics.audio import (
    cycle_marks,
    f0_track,
    hnr,
    jitter,
    jitter_metrics,
    shimmer,
    shimmer_metrics,
)
from convometrics.errors import NoVoicedContent, TooFewPeriods
from convometrics.sessions import AudioTrack

RATE = 48000


class TestF0:
    def test_sine_220(self):
        track = AudioTrack(synth.sine(220, 3.0, RATE, 0.4), RATE)
        pitch = f0_track(track)
        assert np.all(pitch.voiced)
        assert pitch.f0 == pytest.approx(np.full(6, 220.0), abs=2.0)

    def test_sine_220_at_16k(self):
        track = AudioTrack(synth.sine(220, 3.0, 16000, 0.4), 16000)
        assert f0_track(track).f0 == pytest.approx(np.full(6, 220.0), abs=2.0)

    def test_silence_unvoiced(self):
        pitch = f0_track(AudioTrack(np.zeros(2 * RATE), RATE))
        assert not np.any(pitch.voiced)

    def test_pulse_train_100(self):
        track = AudioTrack(synth.pulse_train(100, 3.0, RATE) * 0.5, RATE)
        assert f0_track(track).f0 == pytest.approx(np.full(6, 100.0), abs=1.0)

    def test_no_octave_error_on_high_pitch(self):
        # 440 Hz has its subharmonic 220 Hz inside the search range
        track = AudioTrack(synth.sine(440, 2.0, RATE, 0.4), RATE)
        assert f0_track(track).f0 == pytest.approx(np.full(4, 440.0), abs=3.0)

    def test_window_count(self):
        track = AudioTrack(synth.sine(150, 2.75, RATE, 0.4), RATE)
        assert len(f0_track(track).f0) == 5  # floor(2.75 / 0.5)


class TestJitterShimmer:
    def test_jitter_constant(self):
        assert jitter([0.01] * 10) == 0.0

    def test_jitter_alternating(self):
        periods = [0.010, 0.011] * 5
        assert jitter(periods) == pytest.approx(0.001 / 0.0105, rel=1e-9)

    def test_jitter_too_few(self):
        with pytest.raises(TooFewPeriods):
            jitter([0.01])

    def test_jitter_scale_invariant_exact(self):
        rng = np.random.default_rng(3)
        periods = rng.uniform(0.008, 0.012, 40)
        assert jitter(periods) == jitter(periods * 0.5)
        assert jitter(periods) == jitter(periods * 4.0)

    def test_shimmer_constant(self):
        assert shimmer([0.7] * 8) == 0.0

    def test_shimmer_alternating(self):
        amps = [1.0, 0.8] * 6
        assert shimmer(amps) == pytest.approx(0.2 / 0.9, rel=1e-9)

    def test_shimmer_too_few(self):
        with pytest.raises(TooFewPeriods):
            shimmer([1.0])

    def test_shimmer_scale_invariant_exact(self):
        rng = np.random.default_rng(4)
        amps = rng.uniform(0.5, 1.0, 40)
        assert shimmer(amps) == shimmer(amps * 0.25)

    def test_families_on_perturbed_pulse_train(self):
        rng = np.random.default_rng(5)
        x = synth.pulse_train(100, 4.0, RATE, jitter_rel=0.02, rng=rng)
        x = synth.resonator(x, 500, 80, RATE)
        x = x / np.max(np.abs(x)) * 0.5
        marks, amps = cycle_marks(x, RATE, 100.0)
        metrics = jitter_metrics([np.diff(marks)])
        assert metrics["local"] > 0.005
        assert metrics["rap"] is not None and metrics["ddp"] == pytest.approx(
            3 * metrics["rap"], rel=1e-6)
        smetrics = shimmer_metrics([amps])
        assert smetrics["local"] is not None
        assert smetrics["dda"] == pytest.approx(3 * smetrics["apq3"], rel=1e-6)


class TestCycleMarks:
    def test_sine_marks_regular(self):
        x = synth.sine(220, 1.0, RATE, 0.4)
        marks, amps = cycle_marks(x, RATE, 220.0)
        periods = np.diff(marks)
        assert len(periods) > 200
        assert np.std(periods) / np.mean(periods) < 1e-3
        assert np.std(amps) / np.mean(amps) < 1e-3

    def test_too_short(self):
        marks, amps = cycle_marks(np.zeros(10), RATE, 100.0)
        assert len(marks) == 0


class TestHnr:
    def test_pure_sine_hits_cap(self):
        assert hnr(AudioTrack(synth.sine(220, 2.0, RATE, 0.4), RATE)) >= 40.0 - 1e-9

    def test_white_noise_below_zero(self):
        rng = np.random.default_rng(6)
        assert hnr(AudioTrack(rng.normal(0, 0.2, 2 * RATE), RATE)) <= 0.0

    def test_sine_plus_equal_power_noise_near_zero(self):
        rng = np.random.default_rng(7)
        s = synth.sine(220, 2.0, RATE, 0.4)
        noise = rng.normal(0, np.sqrt(np.mean(s ** 2)), len(s))
        assert hnr(AudioTrack(s + noise, RATE)) == pytest.approx(0.0, abs=1.5)

    def test_silence_raises(self):
        with pytest.raises(NoVoicedContent):
            hnr(AudioTrack(np.zeros(RATE), RATE))
