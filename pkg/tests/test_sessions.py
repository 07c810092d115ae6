"""Event streams, zero-order-hold resampling, and stream alignment."""

import numpy as np
import pytest

from convometrics.errors import NonMonotonicTimestamps, OutOfRange, UnusableSession
from convometrics.sessions import (
    Event,
    EventStream,
    ImpactValue,
    align_streams,
    resample_events,
)
from convometrics.synth import random_event_stream

from conftest import make_emotion_frames, make_session


def zoh_oracle(stream, duration, rate):
    """Brute-force hold: walk every frame center and scan the event list."""
    import math
    n = math.ceil(duration * rate - 1e-9)
    ordinals = [(e.t, e.value.valence) for e in stream if e.value.is_ordinal]
    values = []
    for k in range(n):
        t = (k + 0.5) / rate
        state = 0
        for et, val in ordinals:
            if et <= t:
                state = val
            else:
                break
        values.append(state)
    return values


class TestImpactValue:
    def test_valence(self):
        assert ImpactValue.POSITIVE.valence == 1
        assert ImpactValue.NEUTRAL.valence == 0
        assert ImpactValue.NEGATIVE.valence == -1

    def test_marker_valence_undefined(self):
        with pytest.raises(OutOfRange):
            ImpactValue.EOI_POSITIVE.valence
        with pytest.raises(OutOfRange):
            ImpactValue.EOI_NEGATIVE.valence

    def test_wire_codes(self):
        assert ImpactValue.EOI_POSITIVE.value == 4
        assert ImpactValue.EOI_NEGATIVE.value == 5


class TestEventStream:
    def test_monotonic_enforced(self):
        with pytest.raises(NonMonotonicTimestamps):
            EventStream([Event(5.0, ImpactValue.POSITIVE),
                         Event(4.0, ImpactValue.NEGATIVE)])

    def test_equal_timestamps_rejected(self):
        with pytest.raises(NonMonotonicTimestamps):
            EventStream([Event(1.0, ImpactValue.POSITIVE),
                         Event(1.0, ImpactValue.NEGATIVE)])

    def test_partition(self):
        stream = EventStream([Event(0.5, ImpactValue.POSITIVE),
                              Event(1.0, ImpactValue.EOI_NEGATIVE),
                              Event(2.0, ImpactValue.NEUTRAL)])
        assert len(stream.ordinal_events()) == 2
        assert len(stream.marker_events()) == 1


class TestResample:
    def test_constant_hold(self):
        series = resample_events(EventStream([Event(0.0, ImpactValue.POSITIVE)]), 1.0, 30)
        assert len(series) == 30
        assert np.all(series.values == 1)

    def test_split_hold(self):
        stream = EventStream([Event(0.0, ImpactValue.POSITIVE),
                              Event(0.5, ImpactValue.NEGATIVE)])
        series = resample_events(stream, 1.0, 30)
        assert list(series.values[:15]) == [1] * 15
        assert list(series.values[15:]) == [-1] * 15

    def test_empty_stream_is_neutral(self):
        series = resample_events(EventStream([]), 1.0, 30)
        assert len(series) == 30
        assert np.all(series.values == 0)

    def test_markers_do_not_change_state(self):
        stream = EventStream([Event(0.0, ImpactValue.POSITIVE),
                              Event(0.4, ImpactValue.EOI_NEGATIVE)])
        series = resample_events(stream, 1.0, 30)
        assert np.all(series.values == 1)

    def test_marker_before_first_ordinal_keeps_neutral(self):
        stream = EventStream([Event(0.1, ImpactValue.EOI_POSITIVE),
                              Event(0.5, ImpactValue.NEGATIVE)])
        series = resample_events(stream, 1.0, 10)
        assert list(series.values) == [0, 0, 0, 0, 0, -1, -1, -1, -1, -1]

    def test_bad_args(self):
        with pytest.raises(OutOfRange):
            resample_events(EventStream([]), 0.0, 30)
        with pytest.raises(OutOfRange):
            resample_events(EventStream([]), 1.0, 0)

    def test_matches_oracle_randomized(self):
        rng = np.random.default_rng(2024)
        for _ in range(500):
            duration = float(rng.uniform(0.5, 20.0))
            stream = random_event_stream(rng, duration)
            series = resample_events(stream, duration, 30)
            assert list(series.values) == zoh_oracle(stream, duration, 30)

    def test_idempotent_at_same_rate(self):
        rng = np.random.default_rng(7)
        for _ in range(50):
            duration = float(rng.uniform(1.0, 10.0))
            stream = random_event_stream(rng, duration)
            series = resample_events(stream, duration, 30)
            # rebuild an event stream from the series' own transitions
            events = []
            prev = None
            mapping = {1: ImpactValue.POSITIVE, 0: ImpactValue.NEUTRAL,
                       -1: ImpactValue.NEGATIVE}
            for k, v in enumerate(series.values):
                if prev is None or v != prev:
                    events.append(Event(k / series.rate, mapping[int(v)]))
                    prev = v
            again = resample_events(EventStream(events), duration, 30)
            assert np.array_equal(series.values, again.values)

    def test_change_count_bounded_by_events(self):
        rng = np.random.default_rng(11)
        for _ in range(200):
            duration = float(rng.uniform(0.5, 15.0))
            stream = random_event_stream(rng, duration)
            series = resample_events(stream, duration, 30)
            changes = int(np.sum(series.values[1:] != series.values[:-1]))
            assert changes <= len(stream.ordinal_events())

    def test_dwell_time_error_bounded(self):
        rng = np.random.default_rng(13)
        for _ in range(100):
            duration = float(rng.uniform(1.0, 12.0))
            stream = random_event_stream(rng, duration, include_markers=False)
            series = resample_events(stream, duration, 30)
            ordinals = stream.ordinal_events()
            # true dwell per state from the event intervals
            true_dwell = {1: 0.0, 0: 0.0, -1: 0.0}
            bounds = [0.0] + [e.t for e in ordinals] + [duration]
            states = [0] + [e.value.valence for e in ordinals]
            for state, t0, t1 in zip(states, bounds, bounds[1:]):
                true_dwell[state] += max(t1 - t0, 0.0)
            sampled = {v: float(np.sum(series.values == v)) / 30 for v in (1, 0, -1)}
            transitions = len(ordinals) + 1
            for v in (1, 0, -1):
                assert abs(sampled[v] - true_dwell[v]) <= transitions / 30 + 1e-9


class TestAlign:
    def test_common_grid_lengths(self):
        session = make_session(
            duration=4.0,
            self_events=EventStream([Event(1.0, ImpactValue.POSITIVE)]),
        )
        aligned = align_streams(session, 30)
        assert len(aligned.impact) == len(aligned.self_assessment) == aligned.n_frames

    def test_unusable_rejected(self):
        session = make_session()
        with pytest.raises(UnusableSession):
            align_streams(session, 30, usable=False)

    def test_emotion_nearest_mapping_duplication_rate(self):
        fps_src = 29.79
        duration = 5.0
        n_src = int(duration * fps_src)
        times = (np.arange(n_src) + 0.5) / fps_src
        frames = make_emotion_frames(times, np.zeros((n_src, 48)))
        session = make_session(duration=duration, emotions=frames)
        aligned = align_streams(session, 30)
        index = aligned.emotion_frame_index
        duplicates = len(index) - len(np.unique(index))
        assert duplicates <= len(index) / 150 + 1

    def test_half_rate_halves_length(self):
        session = make_session(duration=7.3)
        full = align_streams(session, 30)
        half = align_streams(session, 15)
        assert abs(len(half.impact) - len(full.impact) / 2) <= 1

    def test_eoi_marks_land_on_nearest_frame(self):
        session = make_session(
            duration=2.0,
            eoi=EventStream([Event(1.0, ImpactValue.EOI_NEGATIVE)]),
        )
        aligned = align_streams(session, 30)
        assert len(aligned.eoi_marks) == 1
        frame, value = aligned.eoi_marks[0]
        assert value is ImpactValue.EOI_NEGATIVE
        assert abs((frame + 0.5) / 30 - 1.0) <= 0.5 / 30 + 1e-9
