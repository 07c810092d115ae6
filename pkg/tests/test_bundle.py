"""Bundle ingestion, validation, serialization round trips, annotation merging."""

import json

import numpy as np
import pytest

from convometrics.bundle import (
    find_bundles,
    ingest_bundle,
    merge_self_annotations,
    validate_session,
    write_bundle,
)
from convometrics.errors import (
    MalformedStream,
    MissingManifest,
    NonMonotonicTimestamps,
    RateOutOfRange,
)
from convometrics.sessions import Event, EventStream, ImpactValue

from conftest import make_emotion_frames, make_session


@pytest.fixture
def bundle_dir(tmp_path):
    session = make_session(
        eoi=EventStream([Event(1.5, ImpactValue.EOI_POSITIVE)]),
        emotions=make_emotion_frames([0.1, 0.2, 0.3], [{"Joy": 0.5}, {"Fear": 0.2}, {}]),
    )
    return write_bundle(session, tmp_path / "sess-1")


class TestIngest:
    def test_happy_path(self, bundle_dir):
        session = ingest_bundle(bundle_dir)
        assert session.session_id == "sess-1"
        assert session.participant_audio.sample_rate == 16000
        assert len(session.impact_events) == 2
        assert len(session.eoi_events) == 1
        assert len(session.emotion_frames) == 3
        assert session.survey.inhabiter_item1 == 8

    def test_missing_manifest(self, tmp_path):
        with pytest.raises(MissingManifest):
            ingest_bundle(tmp_path)

    def test_manifest_rate_out_of_range(self, bundle_dir):
        manifest = json.loads((bundle_dir / "manifest.json").read_text())
        manifest["sample_rates"]["participant_audio_hz"] = 8000
        (bundle_dir / "manifest.json").write_text(json.dumps(manifest))
        with pytest.raises(RateOutOfRange):
            ingest_bundle(bundle_dir)

    def test_wav_rate_out_of_range(self, bundle_dir, tmp_path):
        from convometrics.wavio import write_wav
        manifest = json.loads((bundle_dir / "manifest.json").read_text())
        del manifest["sample_rates"]["participant_audio_hz"]
        (bundle_dir / "manifest.json").write_text(json.dumps(manifest))
        write_wav(bundle_dir / "participant.wav", np.zeros(1000), 8000)
        with pytest.raises(RateOutOfRange):
            ingest_bundle(bundle_dir)

    def test_non_monotonic_events(self, bundle_dir):
        (bundle_dir / "impact.jsonl").write_text(
            '{"t": 5.0, "v": "positive"}\n{"t": 4.0, "v": "neutral"}\n')
        with pytest.raises(NonMonotonicTimestamps):
            ingest_bundle(bundle_dir)

    def test_malformed_event_line_reports_position(self, bundle_dir):
        (bundle_dir / "impact.jsonl").write_text(
            '{"t": 1.0, "v": "positive"}\n{"t": 2.0, "v": "sideways"}\n')
        with pytest.raises(MalformedStream) as err:
            ingest_bundle(bundle_dir)
        assert err.value.line == 2

    def test_bad_scenario(self, bundle_dir):
        manifest = json.loads((bundle_dir / "manifest.json").read_text())
        manifest["scenario_id"] = 7
        (bundle_dir / "manifest.json").write_text(json.dumps(manifest))
        with pytest.raises(MalformedStream):
            ingest_bundle(bundle_dir)

    def test_emotion_probability_out_of_range(self, bundle_dir):
        path = bundle_dir / "emotions.csv"
        lines = path.read_text().splitlines()
        cells = lines[1].split(",")
        cells[2] = "1.5"
        lines[1] = ",".join(cells)
        path.write_text("\n".join(lines) + "\n")
        with pytest.raises(MalformedStream):
            ingest_bundle(bundle_dir)

    def test_declared_file_missing(self, bundle_dir):
        (bundle_dir / "survey.json").unlink()
        with pytest.raises(MalformedStream):
            ingest_bundle(bundle_dir)

    def test_round_trip_equality(self, bundle_dir, tmp_path):
        session = ingest_bundle(bundle_dir)
        write_bundle(session, tmp_path / "copy")
        again = ingest_bundle(tmp_path / "copy")
        assert again.session_id == session.session_id
        assert again.participant_audio == session.participant_audio
        assert again.impact_events == session.impact_events
        assert again.eoi_events == session.eoi_events
        assert again.emotion_frames == session.emotion_frames
        assert again.survey == session.survey
        assert again.duration == session.duration


class TestValidate:
    def test_healthy_session_usable(self, bundle_dir):
        report = validate_session(ingest_bundle(bundle_dir))
        assert report.usable
        assert all(i.severity == "warning" for i in report.issues)

    def test_missing_survey_fatal(self, tmp_path):
        session = make_session()
        path = write_bundle(session, tmp_path / "b")
        manifest = json.loads((path / "manifest.json").read_text())
        del manifest["files"]["survey"]
        (path / "manifest.json").write_text(json.dumps(manifest))
        report = validate_session(ingest_bundle(path))
        assert not report.usable
        assert any(i.code == "missing_stream" for i in report.issues)

    def test_duration_skew_within_tolerance(self):
        session = make_session(duration=4.0)
        # trim half a second of audio: 3.5 vs 4.0 manifest, inside the 2 s gate
        session.participant_audio.samples = session.participant_audio.samples[:-8000]
        assert validate_session(session).usable

    def test_duration_skew_beyond_tolerance(self):
        session = make_session(duration=8.0)
        session.duration = 8.0
        session.participant_audio.samples = session.participant_audio.samples[:16000]
        report = validate_session(session)
        assert not report.usable
        assert any(i.code == "duration_mismatch" for i in report.issues)

    def test_missing_self_stream_only_warns(self, bundle_dir):
        report = validate_session(ingest_bundle(bundle_dir))
        assert report.usable
        assert any(i.code == "missing_optional" and "self" in i.message
                   for i in report.issues)

    def test_event_beyond_duration_fatal(self):
        session = make_session(duration=4.0, impact=EventStream(
            [Event(5.0, ImpactValue.POSITIVE)]))
        report = validate_session(session)
        assert not report.usable
        assert any(i.code == "timestamp_range" for i in report.issues)


class TestMergeAnnotations:
    def test_merge_valid_stream(self, bundle_dir, tmp_path):
        events = tmp_path / "export.jsonl"
        events.write_text('{"t": 0.5, "v": "positive"}\n{"t": 2.5, "v": "neutral"}\n')
        count = merge_self_annotations(bundle_dir, events)
        assert count == 2
        session = ingest_bundle(bundle_dir)
        assert len(session.self_events) == 2

    def test_invalid_stream_leaves_bundle_unchanged(self, bundle_dir, tmp_path):
        before = (bundle_dir / "manifest.json").read_bytes()
        events = tmp_path / "export.jsonl"
        events.write_text('{"t": 2.0, "v": "positive"}\n{"t": 1.0, "v": "neutral"}\n')
        with pytest.raises(NonMonotonicTimestamps):
            merge_self_annotations(bundle_dir, events)
        assert (bundle_dir / "manifest.json").read_bytes() == before
        assert not (bundle_dir / "self.jsonl").exists()

    def test_event_outside_duration_rejected(self, bundle_dir, tmp_path):
        events = tmp_path / "export.jsonl"
        events.write_text('{"t": 99.0, "v": "positive"}\n')
        with pytest.raises(MalformedStream):
            merge_self_annotations(bundle_dir, events)


def test_find_bundles(tmp_path):
    write_bundle(make_session(session_id="a"), tmp_path / "a")
    write_bundle(make_session(session_id="b"), tmp_path / "b")
    (tmp_path / "not-a-bundle").mkdir()
    assert [p.name for p in find_bundles(tmp_path)] == ["a", "b"]
