"""RIFF WAVE reading and writing for 16-bit PCM mono tracks."""

from __future__ import annotations

import wave
from pathlib import Path

import numpy as np

from .errors import MalformedStream

_FULL_SCALE = 32767.0


def read_wav(path: str | Path) -> tuple[np.ndarray, int]:
    """Read a mono 16-bit PCM WAV file into float64 samples in [-1, 1]."""
    path = Path(path)
    try:
        with wave.open(str(path), "rb") as wav:
            channels = wav.getnchannels()
            width = wav.getsampwidth()
            rate = wav.getframerate()
            n = wav.getnframes()
            raw = wav.readframes(n)
    except (wave.Error, EOFError, OSError) as exc:
        raise MalformedStream(path.name, message=str(exc)) from exc
    if channels != 1:
        raise MalformedStream(path.name, message=f"expected mono audio, got {channels} channels")
    if width != 2:
        raise MalformedStream(path.name, message=f"expected 16-bit PCM, got {8 * width}-bit")
    samples = np.frombuffer(raw, dtype="<i2").astype(np.float64) / _FULL_SCALE
    return samples, rate


def write_wav(path: str | Path, samples: np.ndarray, rate: int) -> None:
    """Write float samples in [-1, 1] as a mono 16-bit PCM WAV file."""
    ints = np.clip(np.rint(np.asarray(samples, dtype=np.float64) * _FULL_SCALE), -32768, 32767)
    data = ints.astype("<i2").tobytes()
    with wave.open(str(path), "wb") as wav:
        wav.setnchannels(1)
        wav.setsampwidth(2)
        wav.setframerate(int(rate))
        wav.writeframes(data)
