"""Energy-plus-zero-crossing voice activity detection with hangover smoothing."""

from __future__ import annotations

import numpy as np

from ..errors import EmptyAudio
from ..sessions import AudioTrack

VadSegments = list[tuple[float, float]]

FRAME_MS = 10.0
_EPS = 1e-12
# frames within this margin below the main threshold still count when their
# zero-crossing rate looks like frication
_SECONDARY_MARGIN_DB = 15.0
_ZCR_FRICATIVE = 0.15  # crossings per sample
# nothing below this absolute level is ever speech, whatever the track peak
SILENCE_FLOOR_DB = -70.0


def _frames(samples: np.ndarray, rate: int, frame_ms: float = FRAME_MS) -> np.ndarray:
    size = int(round(rate * frame_ms / 1000.0))
    n = len(samples) // size
    return samples[: n * size].reshape(n, size)


def frame_intensity_db(samples: np.ndarray, rate: int, frame_ms: float = FRAME_MS) -> np.ndarray:
    """Mean-square frame energy in dB relative to full scale."""
    frames = _frames(samples, rate, frame_ms)
    if frames.shape[0] == 0:
        return np.zeros(0)
    return 10.0 * np.log10(np.mean(frames * frames, axis=1) + _EPS)


def frame_zero_crossing_rate(samples: np.ndarray, rate: int, frame_ms: float = FRAME_MS) -> np.ndarray:
    frames = _frames(samples, rate, frame_ms)
    if frames.shape[0] == 0:
        return np.zeros(0)
    signs = np.signbit(frames)
    return np.sum(signs[:, 1:] != signs[:, :-1], axis=1) / frames.shape[1]


def vad(track: AudioTrack, threshold_db: float = -35.0, hangover_ms: float = 150.0,
        frame_ms: float = FRAME_MS) -> VadSegments:
    """Detect voiced intervals as (start_s, end_s) pairs.

    `threshold_db` is relative to the track's loudest frame, so a recording
    gain change moves the gate with it and segment boundaries stay put; an
    absolute silence floor still rejects near-digital silence. A frame within
    a margin below the gate also counts when its zero-crossing rate looks like
    frication. Gaps shorter than the hangover are bridged so one utterance
    stays one segment; boundaries keep frame resolution.
    """
    if len(track.samples) == 0:
        raise EmptyAudio("empty audio track")
    energy = frame_intensity_db(track.samples, track.sample_rate, frame_ms)
    zcr = frame_zero_crossing_rate(track.samples, track.sample_rate, frame_ms)
    gate = max(float(np.max(energy)) + threshold_db, SILENCE_FLOOR_DB) \
        if len(energy) else SILENCE_FLOOR_DB
    active = (energy >= gate) | (
        (energy >= max(gate - _SECONDARY_MARGIN_DB, SILENCE_FLOOR_DB))
        & (zcr >= _ZCR_FRICATIVE)
    )
    hop_s = frame_ms / 1000.0
    segments: VadSegments = []
    start = None
    for k, flag in enumerate(active):
        if flag and start is None:
            start = k
        elif not flag and start is not None:
            segments.append((start * hop_s, k * hop_s))
            start = None
    if start is not None:
        # active through the final full frame: extend to the true track end
        segments.append((start * hop_s, track.duration))

    merged: VadSegments = []
    max_gap = hangover_ms / 1000.0
    for seg in segments:
        if merged and seg[0] - merged[-1][1] <= max_gap:
            merged[-1] = (merged[-1][0], seg[1])
        else:
            merged.append(seg)
    # isolated clicks shorter than three frames are noise, not speech
    return [s for s in merged if s[1] - s[0] >= 3 * hop_s]
