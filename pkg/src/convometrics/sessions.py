"""Session data model: event streams, audio tracks, and frame-grid resampling."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import NamedTuple, Optional, Sequence

import numpy as np

from .errors import NonMonotonicTimestamps, OutOfRange, UnusableSession


class ImpactValue(enum.Enum):
    """Moment-by-moment rating states plus instantaneous point-of-interest markers.

    The three ordinal states carry a valence; the point-of-interest markers
    (wire codes 4 and 5) are discrete events and never alter the held state.
    """

    POSITIVE = "positive"
    NEUTRAL = "neutral"
    NEGATIVE = "negative"
    EOI_POSITIVE = 4
    EOI_NEGATIVE = 5

    @property
    def is_ordinal(self) -> bool:
        return self in (ImpactValue.POSITIVE, ImpactValue.NEUTRAL, ImpactValue.NEGATIVE)

    @property
    def valence(self) -> int:
        if self is ImpactValue.POSITIVE:
            return 1
        if self is ImpactValue.NEUTRAL:
            return 0
        if self is ImpactValue.NEGATIVE:
            return -1
        raise OutOfRange(f"valence is undefined for marker {self.name}")


class Event(NamedTuple):
    t: float
    value: ImpactValue


class EventStream:
    """Ordered timestamped events with strictly increasing timestamps."""

    def __init__(self, events: Sequence[Event | tuple] = ()):
        parsed = [e if isinstance(e, Event) else Event(float(e[0]), e[1]) for e in events]
        for prev, cur in zip(parsed, parsed[1:]):
            if cur.t <= prev.t:
                raise NonMonotonicTimestamps(
                    f"timestamp {cur.t} does not increase past {prev.t}"
                )
        self.events: list[Event] = parsed

    def __len__(self) -> int:
        return len(self.events)

    def __iter__(self):
        return iter(self.events)

    def __eq__(self, other) -> bool:
        return isinstance(other, EventStream) and self.events == other.events

    def __repr__(self) -> str:
        return f"EventStream({self.events!r})"

    def ordinal_events(self) -> list[Event]:
        return [e for e in self.events if e.value.is_ordinal]

    def marker_events(self) -> list[Event]:
        return [e for e in self.events if not e.value.is_ordinal]


@dataclass
class SampledSeries:
    """Ordinal state held on a uniform frame grid; frame k covers center (k+0.5)/rate."""

    rate: float
    values: np.ndarray  # int8 in {-1, 0, +1}
    t0: float = 0.0

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.int8)

    def __len__(self) -> int:
        return len(self.values)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, SampledSeries)
            and self.rate == other.rate
            and self.t0 == other.t0
            and np.array_equal(self.values, other.values)
        )

    @property
    def duration(self) -> float:
        return len(self.values) / self.rate

    def frame_centers(self) -> np.ndarray:
        return self.t0 + (np.arange(len(self.values)) + 0.5) / self.rate


@dataclass
class AudioTrack:
    """Mono PCM track; samples are float64 in [-1, 1]."""

    samples: np.ndarray
    sample_rate: int

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=np.float64)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, AudioTrack)
            and self.sample_rate == other.sample_rate
            and np.array_equal(self.samples, other.samples)
        )

    @property
    def duration(self) -> float:
        return len(self.samples) / self.sample_rate


@dataclass(frozen=True)
class SurveyResponses:
    inhabiter_item1: float
    inhabiter_item2: float
    participant_item: float
    self_estimate: Optional[float] = None


@dataclass
class EmotionFrames:
    """Per-video-frame emotion probabilities, one row per frame, columns in map order."""

    times: np.ndarray  # (n,) seconds
    probs: np.ndarray  # (n, 48) in [0, 1]
    names: tuple[str, ...]

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=np.float64)
        self.probs = np.asarray(self.probs, dtype=np.float64)

    def __len__(self) -> int:
        return len(self.times)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, EmotionFrames)
            and self.names == other.names
            and np.array_equal(self.times, other.times)
            and np.array_equal(self.probs, other.probs)
        )


@dataclass
class Session:
    """One recorded participant-avatar conversation with all of its streams.

    The three required streams (participant audio, rating events, survey) are
    None only for bundles whose manifest omits them; validation marks such
    sessions unusable instead of ingestion refusing to parse the rest.
    """

    session_id: str
    participant_id: str
    scenario_id: int
    duration: float
    participant_audio: Optional[AudioTrack]
    impact_events: Optional[EventStream]
    survey: Optional[SurveyResponses]
    inhabiter_audio: Optional[AudioTrack] = None
    emotion_frames: Optional[EmotionFrames] = None
    eoi_events: Optional[EventStream] = None
    self_events: Optional[EventStream] = None
    manifest: Optional[dict] = None  # raw manifest, kept for provenance checks


@dataclass(frozen=True)
class Issue:
    severity: str  # "fatal" | "warning"
    code: str
    message: str


@dataclass
class ValidationReport:
    session_id: str
    issues: list[Issue] = field(default_factory=list)

    @property
    def usable(self) -> bool:
        return not any(issue.severity == "fatal" for issue in self.issues)

    def add(self, severity: str, code: str, message: str) -> None:
        self.issues.append(Issue(severity, code, message))


def resample_events(stream: EventStream, duration: float, rate: float) -> SampledSeries:
    """Zero-order hold of the ordinal state sampled at frame centers (k+0.5)/rate.

    Point-of-interest markers are ignored; the state before the first ordinal
    event is neutral. An event falling exactly on a frame center wins that frame.
    """
    if duration <= 0:
        raise OutOfRange(f"duration must be positive, got {duration}")
    if rate <= 0:
        raise OutOfRange(f"rate must be positive, got {rate}")
    n = math.ceil(duration * rate - 1e-9)
    ordinal = stream.ordinal_events()
    if not ordinal:
        return SampledSeries(rate=rate, values=np.zeros(n, dtype=np.int8))
    times = np.array([e.t for e in ordinal])
    valences = np.array([e.value.valence for e in ordinal], dtype=np.int8)
    centers = (np.arange(n) + 0.5) / rate
    idx = np.searchsorted(times, centers, side="right") - 1
    values = np.where(idx >= 0, valences[np.clip(idx, 0, None)], np.int8(0))
    return SampledSeries(rate=rate, values=values.astype(np.int8))


@dataclass
class AlignedSession:
    """All session streams re-expressed on one frame grid."""

    session_id: str
    rate: float
    n_frames: int
    impact: SampledSeries
    self_assessment: Optional[SampledSeries]
    eoi_marks: list[tuple[int, ImpactValue]]  # (frame index, marker)
    emotion_frame_index: Optional[np.ndarray]  # source frame per grid frame


def _nearest_frame(t: float, rate: float, n: int) -> int:
    k = int(round(t * rate - 0.5))
    return min(max(k, 0), n - 1)


def align_streams(session: Session, rate: float, usable: bool = True) -> AlignedSession:
    """Resample every event stream of a session onto a common frame grid.

    Emotion frames are mapped by nearest source frame per grid slot, so a
    29.79 Hz source against a 30 Hz grid duplicates roughly one frame per
    five seconds rather than drifting.
    """
    if not usable or session.impact_events is None:
        raise UnusableSession(session.session_id)
    impact = resample_events(session.impact_events, session.duration, rate)
    n = len(impact)
    self_series = None
    if session.self_events is not None:
        self_series = resample_events(session.self_events, session.duration, rate)
    marks: list[tuple[int, ImpactValue]] = []
    if session.eoi_events is not None:
        for event in session.eoi_events:
            if not event.value.is_ordinal:
                marks.append((_nearest_frame(event.t, rate, n), event.value))
    emotion_index = None
    if session.emotion_frames is not None and len(session.emotion_frames) > 0:
        centers = impact.frame_centers()
        src = session.emotion_frames.times
        pos = np.searchsorted(src, centers)
        pos = np.clip(pos, 0, len(src) - 1)
        prev = np.clip(pos - 1, 0, len(src) - 1)
        pick_prev = np.abs(src[prev] - centers) <= np.abs(src[pos] - centers)
        emotion_index = np.where(pick_prev, prev, pos)
    return AlignedSession(
        session_id=session.session_id,
        rate=rate,
        n_frames=n,
        impact=impact,
        self_assessment=self_series,
        eoi_marks=marks,
        emotion_frame_index=emotion_index,
    )
