"""Track preprocessing: high-pass filtering and silence removal."""

from __future__ import annotations

import numpy as np
from scipy import signal

from ..errors import EmptyAudio
from ..sessions import AudioTrack
from .vad import VadSegments, vad


def highpass(track: AudioTrack, cutoff_hz: float = 60.0) -> AudioTrack:
    """Second-order Butterworth high-pass; removes DC and rumble below speech.

    Applied forward-backward (zero phase) so no startup transient leaks into
    the first analysis windows.
    """
    if len(track.samples) == 0:
        raise EmptyAudio("empty audio track")
    b, a = signal.butter(2, cutoff_hz, btype="highpass", fs=track.sample_rate)
    # pad a few cutoff periods so the backward pass settles before the edges
    padlen = min(len(track.samples) - 1, int(3 * track.sample_rate / cutoff_hz))
    if padlen < 3 * max(len(a), len(b)):
        filtered = signal.lfilter(b, a, track.samples)
    else:
        filtered = signal.filtfilt(b, a, track.samples, padlen=padlen)
    return AudioTrack(samples=filtered, sample_rate=track.sample_rate)


def remove_silences(track: AudioTrack, segments: VadSegments,
                    min_gap_s: float = 0.3) -> AudioTrack:
    """Concatenate voiced segments, dropping unvoiced gaps longer than `min_gap_s`.

    Short gaps between segments are kept so within-utterance rhythm survives;
    leading and trailing silence is always trimmed.
    """
    if len(track.samples) == 0:
        raise EmptyAudio("empty audio track")
    if not segments:
        return AudioTrack(samples=np.zeros(0), sample_rate=track.sample_rate)
    rate = track.sample_rate
    pieces: list[np.ndarray] = []
    cursor = segments[0][0]
    for start, end in segments:
        if start - cursor > min_gap_s:
            cursor = start  # drop the long gap
        pieces.append(track.samples[int(round(cursor * rate)): int(round(end * rate))])
        cursor = end
    return AudioTrack(samples=np.concatenate(pieces), sample_rate=rate)


def preprocess(track: AudioTrack, cutoff_hz: float = 60.0,
               vad_threshold_db: float = -35.0, vad_hangover_ms: float = 150.0,
               min_gap_s: float = 0.3) -> AudioTrack:
    """High-pass filter, then cut long silences using voice-activity segments."""
    filtered = highpass(track, cutoff_hz)
    segments = vad(filtered, threshold_db=vad_threshold_db, hangover_ms=vad_hangover_ms)
    return remove_silences(filtered, segments, min_gap_s=min_gap_s)
