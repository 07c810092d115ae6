"""The assembled 53-feature vector: registry contract and invariances."""

import numpy as np
import pytest

from convometrics import synth
from convometrics.audio import (
    audio_feature_names,
    audio_feature_vector,
    feature_registry,
)
from convometrics.errors import EmptyAudio
from convometrics.sessions import AudioTrack

RATE = 16000


def voiced_track(rate=RATE, gain=1.0, lead_silence_s=0.0):
    rng = np.random.default_rng(10)
    voice = synth.synth_vowel(140, [500, 1500, 2500, 3500], 4.0, rate, amplitude=0.35)
    voice = voice * synth.syllable_envelope(4.0, rate, 3.5)
    sig = np.concatenate([
        np.zeros(int(lead_silence_s * rate)),
        voice,
        np.zeros(int(0.8 * rate)),
        voice,
    ])
    return AudioTrack(sig * gain, rate)


class TestRegistry:
    def test_exactly_53(self):
        assert len(feature_registry()) == 53
        assert len(audio_feature_names()) == 53

    def test_unique_names(self):
        names = audio_feature_names()
        assert len(set(names)) == 53

    def test_subset_sizes(self):
        assert len(audio_feature_names(subset=1)) == 42
        assert len(audio_feature_names(subset=2)) == 5
        assert len(audio_feature_names(subset=3)) == 6

    def test_units_present(self):
        assert all(f["unit"] for f in feature_registry())


class TestFeatureVector:
    def test_synthetic_vowel_fully_populated(self):
        vector = audio_feature_vector(voiced_track())
        assert vector.usable
        assert vector.absent() == []
        assert vector["f0_mean_hz"] == pytest.approx(140, abs=5)

    def test_silence_unusable_all_absent(self):
        vector = audio_feature_vector(AudioTrack(np.zeros(3 * RATE), RATE))
        assert not vector.usable
        assert len(vector.absent()) == 53

    def test_empty_audio_raises(self):
        with pytest.raises(EmptyAudio):
            audio_feature_vector(AudioTrack(np.zeros(0), RATE))

    def test_deterministic(self):
        track = voiced_track()
        a = audio_feature_vector(track)
        b = audio_feature_vector(track)
        assert a.values == b.values

    def test_amplitude_invariance(self):
        base = audio_feature_vector(voiced_track(gain=1.0))
        quiet = audio_feature_vector(voiced_track(gain=0.25))
        relative_keys = [
            "f0_mean_hz", "f0_median_hz", "jitter_local",
            "f1_mean_hz", "f2_mean_hz", "f3_mean_hz", "f4_mean_hz",
            "formant_dispersion_hz", "formant_spacing_hz",
            "vocal_tract_length_cm", "syllable_count",
        ]
        for key in relative_keys:
            assert base[key] == pytest.approx(quiet[key], rel=0.01), key
        # binary gain scales amplitudes exactly, so the ratio is bit-identical
        assert base["shimmer_local"] == quiet["shimmer_local"]
        assert base["hnr_mean_db"] == pytest.approx(quiet["hnr_mean_db"], abs=0.5)

    def test_time_shift_invariance(self):
        base = audio_feature_vector(voiced_track(lead_silence_s=0.0))
        shifted = audio_feature_vector(voiced_track(lead_silence_s=0.2))
        for key in ["f0_mean_hz", "jitter_local", "f1_mean_hz", "f2_mean_hz",
                    "vocal_tract_length_cm", "syllable_count"]:
            assert base[key] == pytest.approx(shifted[key], rel=0.01), key
        assert base["hnr_mean_db"] == pytest.approx(shifted["hnr_mean_db"], abs=0.5)
        assert base["shimmer_local"] == pytest.approx(shifted["shimmer_local"], rel=0.02)

    def test_phonation_bounded(self):
        vector = audio_feature_vector(voiced_track())
        assert vector["phonation_time_s"] <= vector["speech_duration_s"]
        assert vector["articulation_rate_sps"] >= vector["speech_rate_sps"]
