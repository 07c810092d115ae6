"""Autocorrelation pitch tracking and voice-quality measures.

All windowed analysis uses non-overlapping 0.5 s windows. The normalized
autocorrelation peak doubles as the harmonic fraction, so the same machinery
yields F0 and the harmonics-to-noise ratio.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import NoVoicedContent, TooFewPeriods
from ..sessions import AudioTrack

WINDOW_S = 0.5
VOICING_THRESHOLD = 0.45
_ENERGY_FLOOR_RMS = 1e-4  # below this a window is silence, not analyzable
_OCTAVE_COST = 0.05       # per-octave penalty favoring the shortest strong lag
HNR_CAP_DB = 40.0


@dataclass
class PitchTrack:
    """Per-window fundamental frequency; NaN marks unvoiced windows."""

    times: np.ndarray     # window centers, seconds
    f0: np.ndarray        # Hz, NaN when unvoiced
    harmonicity: np.ndarray  # normalized autocorrelation peak, NaN when silent
    window_s: float = WINDOW_S

    @property
    def voiced(self) -> np.ndarray:
        return ~np.isnan(self.f0)

    def voiced_f0(self) -> np.ndarray:
        return self.f0[self.voiced]


def _normalized_autocorr(x: np.ndarray) -> np.ndarray:
    """NCC(tau) = sum x_t x_{t+tau} / sqrt(E_head(tau) E_tail(tau)), tau in [0, n)."""
    n = len(x)
    nfft = 1 << int(2 * n - 1).bit_length()
    spectrum = np.fft.rfft(x, nfft)
    ac = np.fft.irfft(spectrum * np.conj(spectrum), nfft)[:n]
    energy = np.cumsum(x * x)
    total = energy[-1]
    head = energy[::-1].copy()          # head[tau] = sum_{t=0}^{n-1-tau} x_t^2
    tail = np.empty(n)
    tail[0] = total
    tail[1:] = total - energy[:-1]      # tail[tau] = sum_{t=tau}^{n-1} x_t^2
    denom = np.sqrt(np.maximum(head * tail, 1e-300))
    return np.clip(ac / denom, -1.0, 1.0)


def _parabolic(values: np.ndarray, i: int) -> tuple[float, float]:
    """Refine a local maximum at index i; returns (position, value)."""
    if i <= 0 or i >= len(values) - 1:
        return float(i), float(values[i])
    a, b, c = values[i - 1], values[i], values[i + 1]
    denom = a - 2 * b + c
    if denom >= 0:
        return float(i), float(b)
    delta = 0.5 * (a - c) / denom
    return i + delta, b - 0.25 * (a - c) * delta


def _best_lag(ncc: np.ndarray, lag_min: int, lag_max: int) -> tuple[float, float] | None:
    """Pick the pitch lag among local maxima, preferring the shortest strong one."""
    lag_max = min(lag_max, len(ncc) - 2)
    if lag_max <= lag_min:
        return None
    segment = ncc[lag_min:lag_max + 1]
    interior = (segment[1:-1] > segment[:-2]) & (segment[1:-1] >= segment[2:])
    peaks = np.nonzero(interior)[0] + 1 + lag_min
    if len(peaks) == 0:
        return None
    r_best = float(np.max(ncc[peaks]))
    if r_best <= 0:
        return None
    best = None
    best_score = -np.inf
    for lag in peaks:
        r = ncc[lag]
        if r < 0.5 * r_best:
            continue
        score = r - _OCTAVE_COST * np.log2(lag / lag_min)
        if score > best_score:
            best_score = score
            best = lag
    refined_lag, refined_r = _parabolic(ncc, int(best))
    return refined_lag, min(refined_r, 1.0 - 1e-12)


def _windows(samples: np.ndarray, rate: int, window_s: float):
    size = int(round(window_s * rate))
    for k in range(len(samples) // size):
        yield k, samples[k * size: (k + 1) * size]


def f0_track(track: AudioTrack, floor_hz: float = 60.0, ceiling_hz: float = 500.0,
             window_s: float = WINDOW_S) -> PitchTrack:
    """Estimate F0 per window from the normalized autocorrelation peak.

    Windows whose peak correlation falls below the voicing threshold, or whose
    energy sits at the silence floor, are marked unvoiced (NaN). Harmonicity
    is kept for every non-silent window regardless of the voicing decision.
    """
    rate = track.sample_rate
    lag_min = max(2, int(np.floor(rate / ceiling_hz)))
    lag_max = int(np.ceil(rate / floor_hz))
    times, f0s, harm = [], [], []
    for k, chunk in _windows(track.samples, rate, window_s):
        times.append((k + 0.5) * window_s)
        rms = np.sqrt(np.mean(chunk * chunk))
        if rms < _ENERGY_FLOOR_RMS:
            f0s.append(np.nan)
            harm.append(np.nan)
            continue
        x = chunk - np.mean(chunk)
        picked = _best_lag(_normalized_autocorr(x), lag_min, lag_max)
        if picked is None:
            f0s.append(np.nan)
            harm.append(np.nan)
            continue
        lag, r = picked
        harm.append(r)
        f0s.append(rate / lag if r >= VOICING_THRESHOLD else np.nan)
    return PitchTrack(times=np.array(times), f0=np.array(f0s),
                      harmonicity=np.array(harm), window_s=window_s)


def cycle_marks(samples: np.ndarray, rate: int, f0_hz: float) -> tuple[np.ndarray, np.ndarray]:
    """Locate one amplitude peak per glottal cycle.

    Marches outward from the strongest peak in steps of the expected period,
    refining each mark with parabolic interpolation so period and amplitude
    sequences are sub-sample accurate. Returns (times_s, amplitudes).
    """
    n = len(samples)
    period = rate / f0_hz
    if n < 2 * period:
        return np.zeros(0), np.zeros(0)
    anchor = int(np.argmax(samples))
    marks: list[tuple[float, float]] = []

    def _refine(idx: int) -> tuple[float, float]:
        pos, amp = _parabolic(samples, idx)
        return pos, amp

    pos = anchor
    while True:
        lo = int(round(pos + 0.55 * period))
        hi = int(round(pos + 1.45 * period))
        if hi >= n:
            break
        idx = lo + int(np.argmax(samples[lo:hi + 1]))
        marks.append(_refine(idx))
        pos = idx
    pos = anchor
    while True:
        hi = int(round(pos - 0.55 * period))
        lo = int(round(pos - 1.45 * period))
        if lo < 0:
            break
        idx = lo + int(np.argmax(samples[lo:hi + 1]))
        marks.append(_refine(idx))
        pos = idx
    marks.append(_refine(anchor))
    marks.sort(key=lambda m: m[0])
    positions = np.array([m[0] for m in marks]) / rate
    amplitudes = np.array([m[1] for m in marks])
    keep = amplitudes > 0
    return positions[keep], amplitudes[keep]


def jitter(periods) -> float:
    """Cycle-to-cycle period variation: mean |T_{k+1} - T_k| / mean T_k."""
    periods = np.asarray(periods, dtype=np.float64)
    if len(periods) < 2:
        raise TooFewPeriods(f"need at least 2 periods, got {len(periods)}")
    return float(np.mean(np.abs(np.diff(periods))) / np.mean(periods))


def shimmer(amplitudes) -> float:
    """Cycle-to-cycle amplitude variation: mean |A_{k+1} - A_k| / mean A_k."""
    amplitudes = np.asarray(amplitudes, dtype=np.float64)
    if len(amplitudes) < 2:
        raise TooFewPeriods(f"need at least 2 amplitudes, got {len(amplitudes)}")
    return float(np.mean(np.abs(np.diff(amplitudes))) / np.mean(amplitudes))


def _window_devs(values: np.ndarray, width: int) -> list[float]:
    half = width // 2
    return [
        abs(values[i] - np.mean(values[i - half: i + half + 1]))
        for i in range(half, len(values) - half)
    ]


def jitter_metrics(period_groups: list[np.ndarray]) -> dict[str, float | None]:
    """Jitter family pooled across independent stretches of periods.

    Differences are never taken across group boundaries; means pool over all
    periods. Entries that need more cycles than available come back None.
    """
    groups = [np.asarray(g, dtype=np.float64) for g in period_groups if len(g) >= 2]
    if not groups:
        return dict.fromkeys(["local", "absolute_s", "rap", "ppq5", "ddp"])
    all_periods = np.concatenate(groups)
    mean_t = float(np.mean(all_periods))
    diffs = np.concatenate([np.abs(np.diff(g)) for g in groups])
    out: dict[str, float | None] = {
        "local": float(np.mean(diffs)) / mean_t,
        "absolute_s": float(np.mean(diffs)),
    }
    rap_terms = [t for g in groups for t in _window_devs(g, 3)]
    ppq5_terms = [t for g in groups for t in _window_devs(g, 5)]
    out["rap"] = float(np.mean(rap_terms)) / mean_t if rap_terms else None
    out["ppq5"] = float(np.mean(ppq5_terms)) / mean_t if ppq5_terms else None
    ddp_terms = [t for g in groups if len(g) >= 3 for t in np.abs(np.diff(np.diff(g)))]
    out["ddp"] = float(np.mean(ddp_terms)) / mean_t if ddp_terms else None
    return out


def shimmer_metrics(amplitude_groups: list[np.ndarray]) -> dict[str, float | None]:
    """Shimmer family pooled across independent stretches of cycle amplitudes."""
    groups = [np.asarray(g, dtype=np.float64) for g in amplitude_groups if len(g) >= 2]
    if not groups:
        return dict.fromkeys(["local", "db", "apq3", "apq5", "apq11", "dda"])
    all_amps = np.concatenate(groups)
    mean_a = float(np.mean(all_amps))
    diffs = np.concatenate([np.abs(np.diff(g)) for g in groups])
    db_terms = np.concatenate([np.abs(20.0 * np.log10(g[1:] / g[:-1])) for g in groups])
    out: dict[str, float | None] = {
        "local": float(np.mean(diffs)) / mean_a,
        "db": float(np.mean(db_terms)),
    }
    for key, width in (("apq3", 3), ("apq5", 5), ("apq11", 11)):
        terms = [t for g in groups for t in _window_devs(g, width)]
        out[key] = float(np.mean(terms)) / mean_a if terms else None
    dda_terms = [t for g in groups if len(g) >= 3 for t in np.abs(np.diff(np.diff(g)))]
    out["dda"] = float(np.mean(dda_terms)) / mean_a if dda_terms else None
    return out


def hnr_track(track: AudioTrack, floor_hz: float = 60.0, ceiling_hz: float = 500.0,
              window_s: float = WINDOW_S) -> np.ndarray:
    """Per-window harmonics-to-noise ratio in dB over non-silent windows.

    Uses 10 log10(r / (1 - r)) with r the normalized autocorrelation peak at
    the pitch lag, capped at +40 dB; noise-like windows land well below 0 dB.
    """
    pitch = f0_track(track, floor_hz, ceiling_hz, window_s)
    values = []
    for r in pitch.harmonicity:
        if np.isnan(r):
            continue
        if r <= 0:
            values.append(-HNR_CAP_DB)
            continue
        values.append(min(10.0 * np.log10(r / (1.0 - r)), HNR_CAP_DB))
    return np.array(values)


def hnr(track: AudioTrack, floor_hz: float = 60.0, ceiling_hz: float = 500.0,
        window_s: float = WINDOW_S) -> float:
    values = hnr_track(track, floor_hz, ceiling_hz, window_s)
    if len(values) == 0:
        raise NoVoicedContent("no analyzable windows")
    return float(np.mean(values))
