"""The 53-entry audio feature vector and its registry.

The registry JSON shipped with the package is the normative enumeration of
feature names, units, and subsets; the extraction below fills it. Features
that cannot be computed are explicit absent-markers (None), never zeros.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from typing import Optional

import numpy as np

from ..config import AnalysisConfig
from ..errors import EmptyAudio, MissingFormant, NoVoicedContent
from ..sessions import AudioTrack
from . import formants as formants_mod
from . import pitch as pitch_mod
from .preprocess import highpass, remove_silences
from .timing import speech_stats
from .vad import frame_intensity_db, vad

_REGISTRY_ASSET = "data/feature_registry_v1.json"


@lru_cache(maxsize=1)
def feature_registry() -> list[dict]:
    text = resources.files("convometrics").joinpath(_REGISTRY_ASSET).read_text(encoding="utf-8")
    registry = json.loads(text)["features"]
    assert len(registry) == 53, "feature registry must enumerate exactly 53 features"
    return registry


def audio_feature_names(subset: Optional[int] = None) -> list[str]:
    return [f["name"] for f in feature_registry() if subset is None or f["subset"] == subset]


@dataclass
class FeatureVector:
    """Named feature values for one session; None marks an absent feature."""

    values: dict[str, Optional[float]]
    usable: bool = True

    def __getitem__(self, name: str) -> Optional[float]:
        return self.values[name]

    def absent(self) -> list[str]:
        return [name for name, value in self.values.items() if value is None]

    @classmethod
    def all_absent(cls) -> "FeatureVector":
        return cls(values=dict.fromkeys(audio_feature_names()), usable=False)


def _stats(values: np.ndarray, prefix: str, unit: str) -> dict[str, float]:
    return {
        f"{prefix}_mean_{unit}": float(np.mean(values)),
        f"{prefix}_median_{unit}": float(np.median(values)),
        f"{prefix}_min_{unit}": float(np.min(values)),
        f"{prefix}_max_{unit}": float(np.max(values)),
        f"{prefix}_std_{unit}": float(np.std(values)),
    }


def audio_feature_vector(track: AudioTrack,
                         config: AnalysisConfig = AnalysisConfig()) -> FeatureVector:
    """Extract the full 53-feature vector from a participant track.

    The track is high-pass filtered, long silences are removed by voice
    activity detection, and all windowed measures run on the concatenated
    speech. Timing features keep the original timeline. A track with no
    analyzable speech yields an unusable all-absent vector.
    """
    if len(track.samples) == 0:
        raise EmptyAudio("empty audio track")

    values: dict[str, Optional[float]] = dict.fromkeys(audio_feature_names())

    filtered = highpass(track, config.highpass_cutoff_hz)
    segments = vad(filtered, threshold_db=config.vad_threshold_db,
                   hangover_ms=config.vad_hangover_ms)
    speech = remove_silences(filtered, segments, min_gap_s=config.pause_min_s)

    pitch = pitch_mod.f0_track(speech, config.pitch_floor_hz, config.pitch_ceiling_hz,
                               config.pitch_window_s) if len(speech.samples) else None
    if pitch is None or not np.any(pitch.voiced):
        return FeatureVector.all_absent()

    # timing features use the unshortened filtered track
    values.update(speech_stats(filtered, segments, pause_min_s=config.pause_min_s,
                               dip_db=config.syllable_dip_db))

    voiced_f0 = pitch.voiced_f0()
    values.update(_stats(voiced_f0, "f0", "hz"))
    values["f0_range_hz"] = values["f0_max_hz"] - values["f0_min_hz"]
    values["voiced_fraction"] = float(np.mean(pitch.voiced))
    if len(voiced_f0) >= 2:
        t = pitch.times[pitch.voiced]
        values["f0_slope_hz_s"] = float(np.polyfit(t, voiced_f0, 1)[0])

    # one peak per glottal cycle, per voiced window, never across windows
    size = int(round(config.pitch_window_s * speech.sample_rate))
    period_groups, amp_groups = [], []
    for k in np.nonzero(pitch.voiced)[0]:
        window = speech.samples[k * size: (k + 1) * size]
        marks, amps = pitch_mod.cycle_marks(window, speech.sample_rate, pitch.f0[k])
        if len(marks) >= 2:
            period_groups.append(np.diff(marks))
            amp_groups.append(amps)
    for key, value in pitch_mod.jitter_metrics(period_groups).items():
        values[f"jitter_{key}"] = value
    for key, value in pitch_mod.shimmer_metrics(amp_groups).items():
        values[f"shimmer_{key}"] = value

    hnr_values = pitch_mod.hnr_track(speech, config.pitch_floor_hz,
                                     config.pitch_ceiling_hz, config.pitch_window_s)
    if len(hnr_values):
        values.update(_stats(hnr_values, "hnr", "db"))

    try:
        formant_rows = formants_mod.formant_track(
            speech, config.pitch_floor_hz, config.pitch_ceiling_hz, config.pitch_window_s)
    except NoVoicedContent:
        formant_rows = np.zeros((0, 4))
    formant_means: list[Optional[float]] = [None] * 4
    if formant_rows.size:
        for j in range(4):
            column = formant_rows[:, j]
            column = column[~np.isnan(column)]
            if len(column) == 0:
                continue
            formant_means[j] = float(np.mean(column))
            values[f"f{j + 1}_mean_hz"] = formant_means[j]
            values[f"f{j + 1}_median_hz"] = float(np.median(column))
            values[f"f{j + 1}_std_hz"] = float(np.std(column))
    try:
        derived = formants_mod.derived_formant_features(formant_means, values["f0_mean_hz"])
    except MissingFormant:
        pass
    else:
        values["formant_average_hz"] = derived["average_hz"]
        values["formant_dispersion_hz"] = derived["dispersion_hz"]
        values["formant_spacing_hz"] = derived["spacing_hz"]
        values["vocal_tract_length_cm"] = derived["vtl_cm"]
        values["gpr_vtl_interaction"] = derived["gpr_vtl_interaction"]

    intensity = frame_intensity_db(speech.samples, speech.sample_rate)
    intensity = intensity[intensity > -90.0]
    if len(intensity):
        values.update(_stats(intensity, "intensity", "db"))
        values["intensity_range_db"] = values["intensity_max_db"] - values["intensity_min_db"]

    return FeatureVector(values=values, usable=True)
