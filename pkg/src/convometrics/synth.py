"""Synthetic signal and cohort generators for tests and benchmarks.

Everything here is seed-deterministic. The audio cohort plants a known class
signal (pitch register and syllable rate) so the end-to-end pipeline has a
recoverable ground truth; the feature-matrix corpus plants graded informative
columns with designed near-duplicates for the selection arithmetic.
"""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np
from scipy import signal

from .bundle import write_bundle
from .emotion import canonical_map
from .sessions import (
    AudioTrack,
    EmotionFrames,
    Event,
    EventStream,
    ImpactValue,
    Session,
    SurveyResponses,
)
from .svm import Dataset

# --- elementary signals ---


def sine(freq_hz: float, duration_s: float, rate: int, amplitude: float = 0.5,
         phase: float = 0.0) -> np.ndarray:
    t = np.arange(int(round(duration_s * rate))) / rate
    return amplitude * np.sin(2.0 * np.pi * freq_hz * t + phase)


def pulse_train(f0_hz: float, duration_s: float, rate: int,
                jitter_rel: float = 0.0, shimmer_rel: float = 0.0,
                rng: np.random.Generator | None = None) -> np.ndarray:
    """Unit impulses one period apart, with optional relative perturbations."""
    n = int(round(duration_s * rate))
    out = np.zeros(n)
    rng = rng or np.random.default_rng(0)
    t = 0.0
    period = rate / f0_hz
    while t < n - 1:
        amp = 1.0 + (shimmer_rel * rng.uniform(-1, 1) if shimmer_rel else 0.0)
        out[int(round(t))] = amp
        step = period * (1.0 + (jitter_rel * rng.uniform(-1, 1) if jitter_rel else 0.0))
        t += step
    return out


def resonator(x: np.ndarray, freq_hz: float, bandwidth_hz: float, rate: int) -> np.ndarray:
    """Second-order all-pole resonance at freq_hz."""
    r = math.exp(-math.pi * bandwidth_hz / rate)
    theta = 2.0 * math.pi * freq_hz / rate
    a = [1.0, -2.0 * r * math.cos(theta), r * r]
    b = [(1.0 - r) * math.sqrt(1.0 - 2.0 * r * math.cos(2.0 * theta) + r * r)]
    return signal.lfilter(b, a, x)


def synth_vowel(f0_hz: float, formants_hz: list[float], duration_s: float, rate: int,
                bandwidth_hz: float = 80.0, amplitude: float = 0.3) -> np.ndarray:
    """Source-filter vowel: glottal pulse train through cascade resonators."""
    x = pulse_train(f0_hz, duration_s, rate)
    for freq in formants_hz:
        x = resonator(x, freq, bandwidth_hz, rate)
    peak = np.max(np.abs(x))
    return x * (amplitude / peak) if peak > 0 else x


def syllable_envelope(duration_s: float, rate: int, syllables_per_s: float,
                      depth: float = 0.7) -> np.ndarray:
    """Raised-cosine amplitude modulation with one bump per syllable."""
    t = np.arange(int(round(duration_s * rate))) / rate
    bump = 0.5 - 0.5 * np.cos(2.0 * np.pi * syllables_per_s * t)
    return (1.0 - depth) + depth * bump


# --- random event streams (resampling property tests) ---


def random_event_stream(rng: np.random.Generator, duration_s: float,
                        max_events: int = 12, include_markers: bool = True) -> EventStream:
    n = int(rng.integers(0, max_events + 1))
    times = np.sort(rng.uniform(0, duration_s, size=n))
    # enforce strict increase under duplicate draws
    times = np.unique(times)
    ordinals = [ImpactValue.POSITIVE, ImpactValue.NEUTRAL, ImpactValue.NEGATIVE]
    markers = [ImpactValue.EOI_POSITIVE, ImpactValue.EOI_NEGATIVE]
    events = []
    for t in times:
        if include_markers and rng.random() < 0.2:
            events.append(Event(float(t), markers[int(rng.integers(0, 2))]))
        else:
            events.append(Event(float(t), ordinals[int(rng.integers(0, 3))]))
    return EventStream(events)


# --- feature-matrix corpus for selection arithmetic ---


def selection_corpus(seed: int = 0, n_rows: int = 204, n_positive: int = 130,
                     n_informative: int = 17, n_duplicates: int = 3,
                     duplicate_noise: float = 0.05) -> Dataset:
    """53-column synthetic dataset with a designed selection outcome.

    `n_informative` base columns carry graded class signal; the strongest
    `n_duplicates` of them are near-copies (correlation ~0.999), giving
    `n_informative + n_duplicates` informative columns that should own the
    top-20 ranks, of which the duplicates are pruned.
    """
    from .audio.features import audio_feature_names

    names = audio_feature_names()
    n_features = len(names)
    rng = np.random.default_rng(seed)
    y_bool = np.zeros(n_rows, dtype=bool)
    y_bool[:n_positive] = True
    rng.shuffle(y_bool)
    y_signed = np.where(y_bool, 1.0, -1.0)

    X = rng.standard_normal((n_rows, n_features))
    effects = 1.0 - 0.025 * np.arange(n_informative)
    informative_cols = list(range(n_informative))
    for j, effect in zip(informative_cols, effects):
        X[:, j] += effect * y_signed
    duplicate_cols = list(range(n_informative, n_informative + n_duplicates))
    for j, base in zip(duplicate_cols, informative_cols[:n_duplicates]):
        X[:, j] = X[:, base] + duplicate_noise * rng.standard_normal(n_rows)

    labels = np.where(y_bool, "successful", "unsuccessful")
    ids = [f"synthetic-{i:03d}" for i in range(n_rows)]
    return Dataset(feature_names=list(names), session_ids=ids, X=X, y=labels)


# --- full audio cohort ---


def _session_audio(rng: np.random.Generator, rate: int, successful: bool
                   ) -> tuple[np.ndarray, float]:
    """Utterances of vowel-like voice separated by pauses; returns (samples, duration)."""
    f0 = rng.normal(180.0 if successful else 125.0, 10.0)
    f0 = float(np.clip(f0, 90.0, 240.0))
    syllable_rate = rng.normal(4.2 if successful else 3.1, 0.25)
    speaker_scale = rng.uniform(0.92, 1.08)
    formants = [f * speaker_scale for f in (500.0, 1500.0, 2500.0, 3500.0)]
    pieces = [np.zeros(int(0.4 * rate))]
    duration = 0.4
    for _ in range(5):
        utt_s = float(rng.uniform(1.6, 2.4))
        voice = synth_vowel(f0 * rng.uniform(0.97, 1.03), formants, utt_s, rate,
                            amplitude=0.35)
        voice *= syllable_envelope(utt_s, rate, syllable_rate)[:len(voice)]
        pieces.append(voice)
        duration += utt_s
        gap_s = float(rng.uniform(0.6, 1.2))
        pieces.append(np.zeros(int(gap_s * rate)))
        duration += gap_s
    samples = np.concatenate(pieces)
    samples += rng.normal(0.0, 2e-4, size=len(samples))
    return np.clip(samples, -0.99, 0.99), len(samples) / rate


def _session_events(rng: np.random.Generator, duration: float, successful: bool
                    ) -> tuple[EventStream, EventStream, EventStream]:
    weights = [0.6, 0.3, 0.1] if successful else [0.12, 0.33, 0.55]
    states = [ImpactValue.POSITIVE, ImpactValue.NEUTRAL, ImpactValue.NEGATIVE]
    n = int(rng.integers(3, 8))
    times = np.sort(rng.uniform(0.2, duration - 0.2, size=n))
    times = np.unique(times)
    impact = EventStream([
        Event(float(t), states[int(rng.choice(3, p=weights))]) for t in times
    ])
    eoi_times = np.unique(np.sort(rng.uniform(0.2, duration - 0.2, size=int(rng.integers(0, 4)))))
    eoi = EventStream([
        Event(float(t), ImpactValue.EOI_POSITIVE if rng.random() < (0.7 if successful else 0.3)
              else ImpactValue.EOI_NEGATIVE)
        for t in eoi_times
    ])
    self_times = np.unique(np.sort(rng.uniform(0.2, duration - 0.2, size=int(rng.integers(2, 6)))))
    self_stream = EventStream([
        Event(float(t), states[int(rng.choice(3, p=weights))]) for t in self_times
    ])
    return impact, eoi, self_stream


def _session_emotions(rng: np.random.Generator, duration: float, successful: bool,
                      fps: float = 29.79) -> EmotionFrames:
    emap = canonical_map()
    n = int(duration * fps)
    times = (np.arange(n) + 0.5) / fps
    base = np.full(len(emap.names), 0.02)
    bias = {True: {"Joy": 0.35, "Interest": 0.3, "Satisfaction": 0.2, "Calmness": 0.15},
            False: {"Sadness": 0.35, "Boredom": 0.3, "Disappointment": 0.2, "Anxiety": 0.15}}
    for name, value in bias[successful].items():
        base[emap.names.index(name)] += value
    walk = np.cumsum(rng.normal(0, 0.004, size=(n, len(emap.names))), axis=0)
    probs = np.clip(base[None, :] + walk + rng.normal(0, 0.01, size=(n, len(emap.names))),
                    0.0, 1.0)
    return EmotionFrames(times=times, probs=probs, names=emap.names)


def _session_survey(rng: np.random.Generator, successful: bool) -> SurveyResponses:
    if successful:
        item1 = int(rng.integers(7, 11))
        item2 = int(rng.integers(7, 11))
    else:
        item1 = int(rng.integers(1, 7))
        item2 = int(rng.integers(1, 7))
    inhabiter_mean = (item1 + item2) / 2.0
    estimate = int(np.clip(round(inhabiter_mean + rng.normal(0, 2.0)), 1, 10))
    return SurveyResponses(
        inhabiter_item1=float(item1), inhabiter_item2=float(item2),
        participant_item=float(int(np.clip(round(inhabiter_mean + rng.normal(0, 1.5)), 1, 10))),
        self_estimate=float(estimate),
    )


def audio_cohort(outdir: str | Path, seed: int = 0, n_participants: int = 51,
                 n_positive: int = 130, rate: int = 16000,
                 emotions: bool = True) -> tuple[list[Path], dict[str, bool]]:
    """Write a corpus of session bundles with a planted audio class signal.

    Produces 4 scenarios for each participant with exactly `n_positive`
    successful sessions overall. Returns the bundle paths and the ground-truth
    success flag per session id.
    """
    outdir = Path(outdir)
    rng = np.random.default_rng(seed)
    n_sessions = n_participants * 4
    flags = np.zeros(n_sessions, dtype=bool)
    flags[:n_positive] = True
    rng.shuffle(flags)

    paths: list[Path] = []
    truth: dict[str, bool] = {}
    k = 0
    for p in range(n_participants):
        participant_id = f"p{p:03d}"
        for scenario in (1, 2, 3, 4):
            successful = bool(flags[k])
            session_id = f"{participant_id}-s{scenario}"
            samples, duration = _session_audio(rng, rate, successful)
            impact, eoi, self_stream = _session_events(rng, duration, successful)
            session = Session(
                session_id=session_id,
                participant_id=participant_id,
                scenario_id=scenario,
                duration=duration,
                participant_audio=AudioTrack(samples=samples, sample_rate=rate),
                impact_events=impact,
                survey=_session_survey(rng, successful),
                eoi_events=eoi,
                self_events=self_stream,
                emotion_frames=_session_emotions(rng, duration, successful) if emotions else None,
            )
            paths.append(write_bundle(session, outdir / session_id))
            truth[session_id] = successful
            k += 1
    return paths, truth
