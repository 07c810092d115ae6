"""Formant estimation via linear prediction, plus the derived vocal-tract features."""

from __future__ import annotations

import math

import numpy as np
from scipy import signal

from ..errors import MissingFormant, NoVoicedContent
from ..sessions import AudioTrack
from .pitch import WINDOW_S, f0_track

ANALYSIS_RATE = 11000      # Nyquist 5.5 kHz covers the first four formants
FORMANT_MIN_HZ = 90.0
FORMANT_MAX_HZ = 5500.0
BANDWIDTH_MAX_HZ = 700.0
SPEED_OF_SOUND_CM_S = 35000.0
_PREEMPH_FROM_HZ = 50.0


def _levinson(r: np.ndarray, order: int) -> np.ndarray:
    """Levinson-Durbin recursion; returns A(z) coefficients [1, a1..ap]."""
    a = np.zeros(order + 1)
    a[0] = 1.0
    err = r[0]
    for i in range(1, order + 1):
        acc = r[i] + np.dot(a[1:i], r[i - 1:0:-1])
        k = -acc / err
        a[1:i + 1] = a[1:i + 1] + k * a[i - 1::-1][:i]
        err *= (1.0 - k * k)
        if err <= 0:
            break
    return a


def _downsample(samples: np.ndarray, rate: int) -> np.ndarray:
    g = math.gcd(ANALYSIS_RATE, rate)
    return signal.resample_poly(samples, ANALYSIS_RATE // g, rate // g)


def formants_in_window(samples: np.ndarray, rate: int, n_formants: int = 4) -> list[float | None]:
    """Lowest resonance frequencies from one analysis window.

    The window is downsampled to the analysis band, pre-emphasized, and fit
    with an LPC model whose polynomial roots give candidate resonances;
    candidates outside the formant band or with implausible bandwidth are
    rejected. Missing slots come back as None.
    """
    x = _downsample(samples, rate)
    if len(x) < 64:
        return [None] * n_formants
    alpha = np.exp(-2.0 * np.pi * _PREEMPH_FROM_HZ / ANALYSIS_RATE)
    x = np.append(x[0], x[1:] - alpha * x[:-1])
    x = x * np.hamming(len(x))
    order = 2 + ANALYSIS_RATE // 1000
    ac = np.correlate(x, x, mode="full")[len(x) - 1: len(x) + order]
    if ac[0] <= 0:
        return [None] * n_formants
    a = _levinson(ac, order)
    roots = np.roots(a)
    candidates = []
    for root in roots:
        if root.imag <= 0:
            continue
        freq = float(np.arctan2(root.imag, root.real) * ANALYSIS_RATE / (2.0 * np.pi))
        bandwidth = float(-np.log(max(abs(root), 1e-12)) * ANALYSIS_RATE / np.pi)
        if FORMANT_MIN_HZ <= freq <= FORMANT_MAX_HZ and bandwidth <= BANDWIDTH_MAX_HZ:
            candidates.append(freq)
    candidates.sort()
    values: list[float | None] = candidates[:n_formants]
    values.extend([None] * (n_formants - len(values)))
    return values


def formant_track(track: AudioTrack, floor_hz: float = 60.0, ceiling_hz: float = 500.0,
                  window_s: float = WINDOW_S, n_formants: int = 4) -> np.ndarray:
    """Per-voiced-window formants F1..F4; shape (n_voiced_windows, 4), NaN where missing."""
    pitch = f0_track(track, floor_hz, ceiling_hz, window_s)
    if not np.any(pitch.voiced):
        raise NoVoicedContent("no voiced windows for formant analysis")
    size = int(round(window_s * track.sample_rate))
    rows = []
    for k, voiced in enumerate(pitch.voiced):
        if not voiced:
            continue
        window = track.samples[k * size: (k + 1) * size]
        values = formants_in_window(window, track.sample_rate, n_formants)
        rows.append([np.nan if v is None else v for v in values])
    return np.array(rows)


def derived_formant_features(formant_means: list[float], f0_mean_hz: float) -> dict[str, float]:
    """Vocal-tract summary features from the four formant means.

    Spacing is the mean consecutive-formant difference; vocal tract length
    uses the half-wavelength relation VTL = c / (2 * spacing).
    """
    if len(formant_means) != 4 or any(v is None or not np.isfinite(v) for v in formant_means):
        raise MissingFormant("all four formant means are required")
    f = np.asarray(formant_means, dtype=np.float64)
    spacing = float(np.mean(np.diff(f)))
    if spacing <= 0:
        raise MissingFormant(f"non-positive formant spacing {spacing}")
    vtl_cm = SPEED_OF_SOUND_CM_S / (2.0 * spacing)
    return {
        "average_hz": float(np.mean(f)),
        "dispersion_hz": float((f[3] - f[0]) / 3.0),
        "spacing_hz": spacing,
        "vtl_cm": vtl_cm,
        "gpr_vtl_interaction": float(f0_mean_hz) * vtl_cm,
    }
