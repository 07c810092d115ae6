"""Speech-timing statistics: syllable nuclei, pauses, and speaking rates."""

from __future__ import annotations

import numpy as np

from ..sessions import AudioTrack
from .vad import FRAME_MS, VadSegments, frame_intensity_db


def _smooth(values: np.ndarray, width: int = 3) -> np.ndarray:
    if len(values) < width:
        return values
    kernel = np.ones(width) / width
    return np.convolve(values, kernel, mode="same")


def count_syllables(track: AudioTrack, segments: VadSegments, dip_db: float = 2.0,
                    frame_ms: float = FRAME_MS) -> int:
    """Count syllable nuclei as intensity peaks separated by sufficient dips.

    Within each voiced segment, a local intensity maximum starts a new nucleus
    only when the contour has dipped at least `dip_db` below it since the
    previous accepted peak; otherwise the stronger of the two peaks is kept.
    """
    intensity = _smooth(frame_intensity_db(track.samples, track.sample_rate, frame_ms))
    hop_s = frame_ms / 1000.0
    total = 0
    for start, end in segments:
        lo = int(round(start / hop_s))
        hi = min(int(round(end / hop_s)), len(intensity))
        contour = intensity[lo:hi]
        if len(contour) < 3:
            if len(contour) > 0:
                total += 1
            continue
        peaks = [i for i in range(1, len(contour) - 1)
                 if contour[i] > contour[i - 1] and contour[i] >= contour[i + 1]]
        accepted: list[int] = []
        for peak in peaks:
            if not accepted:
                accepted.append(peak)
                continue
            valley = float(np.min(contour[accepted[-1]:peak + 1]))
            if contour[peak] - valley >= dip_db:
                accepted.append(peak)
            elif contour[peak] > contour[accepted[-1]]:
                accepted[-1] = peak
        total += max(len(accepted), 1)  # a voiced segment carries at least one nucleus
    return total


def speech_stats(track: AudioTrack, segments: VadSegments, pause_min_s: float = 0.3,
                 dip_db: float = 2.0) -> dict[str, float | None]:
    """Subset-3 features: durations, syllables, pauses, and rates.

    Rates are None when their denominator is zero rather than silently 0.
    """
    speech_duration = track.duration
    phonation = float(sum(end - start for start, end in segments))
    pauses = sum(
        1 for prev, cur in zip(segments, segments[1:])
        if cur[0] - prev[1] >= pause_min_s
    )
    syllables = count_syllables(track, segments, dip_db) if segments else 0
    return {
        "speech_duration_s": speech_duration,
        "syllable_count": float(syllables),
        "phonation_time_s": phonation,
        "pause_count": float(pauses),
        "speech_rate_sps": syllables / speech_duration if speech_duration > 0 else None,
        "articulation_rate_sps": syllables / phonation if phonation > 0 else None,
    }
