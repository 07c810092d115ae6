"""Audio feature extraction: voice activity, pitch, voice quality, formants,
speech timing, and the assembled per-session feature vector."""

from .vad import VadSegments, vad, frame_intensity_db, frame_zero_crossing_rate
from .preprocess import highpass, remove_silences, preprocess
from .pitch import (
    PitchTrack,
    f0_track,
    jitter,
    shimmer,
    jitter_metrics,
    shimmer_metrics,
    hnr,
    hnr_track,
    cycle_marks,
)
from .formants import formant_track, derived_formant_features
from .timing import speech_stats, count_syllables
from .features import (
    FeatureVector,
    audio_feature_names,
    audio_feature_vector,
    feature_registry,
)

__all__ = [
    "VadSegments", "vad", "frame_intensity_db", "frame_zero_crossing_rate",
    "highpass", "remove_silences", "preprocess",
    "PitchTrack", "f0_track", "jitter", "shimmer", "jitter_metrics",
    "shimmer_metrics", "hnr", "hnr_track", "cycle_marks",
    "formant_track", "derived_formant_features",
    "speech_stats", "count_syllables",
    "FeatureVector", "audio_feature_names", "audio_feature_vector",
    "feature_registry",
]
