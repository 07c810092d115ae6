import numpy as np
import pytest

from convometrics.sessions import (
    AudioTrack,
    EmotionFrames,
    Event,
    EventStream,
    ImpactValue,
    Session,
    SurveyResponses,
)
from convometrics.emotion import canonical_map


def make_session(session_id="sess-1", participant_id="p1", scenario=1, duration=4.0,
                 rate=16000, impact=None, survey=None, emotions=None, eoi=None,
                 self_events=None):
    """A small but fully valid in-memory session."""
    rng = np.random.default_rng(0)
    samples = 0.2 * np.sin(2 * np.pi * 150 * np.arange(int(duration * rate)) / rate)
    samples += rng.normal(0, 1e-4, len(samples))
    if impact is None:
        impact = EventStream([Event(0.5, ImpactValue.POSITIVE),
                              Event(2.0, ImpactValue.NEGATIVE)])
    if survey is None:
        survey = SurveyResponses(inhabiter_item1=8, inhabiter_item2=6,
                                 participant_item=7, self_estimate=7)
    return Session(
        session_id=session_id,
        participant_id=participant_id,
        scenario_id=scenario,
        duration=duration,
        participant_audio=AudioTrack(samples=samples, sample_rate=rate),
        impact_events=impact,
        survey=survey,
        emotion_frames=emotions,
        eoi_events=eoi,
        self_events=self_events,
    )


def make_emotion_frames(times, prob_rows):
    """Frames from dense rows or from {name: p} dicts."""
    emap = canonical_map()
    rows = []
    for row in prob_rows:
        if isinstance(row, dict):
            dense = np.zeros(len(emap.names))
            for name, p in row.items():
                dense[emap.names.index(name)] = p
            rows.append(dense)
        else:
            rows.append(np.asarray(row, dtype=float))
    return EmotionFrames(times=np.asarray(times, dtype=float),
                         probs=np.array(rows), names=emap.names)


@pytest.fixture
def tiny_session():
    return make_session()
