"""Session bundle directory I/O: ingestion, validation, serialization, and
annotation merging.

A bundle is a directory with a `manifest.json` plus the stream files it
declares: WAV audio, `emotions.csv`, JSONL event streams, and `survey.json`.
"""

from __future__ import annotations

import json
import os
from pathlib import Path

import numpy as np

from . import wavio
from .emotion import canonical_map
from .errors import (
    MalformedStream,
    MissingManifest,
    NonMonotonicTimestamps,
    RateOutOfRange,
)
from .sessions import (
    AudioTrack,
    EmotionFrames,
    Event,
    EventStream,
    ImpactValue,
    Session,
    SurveyResponses,
    ValidationReport,
)

MANIFEST_NAME = "manifest.json"
AUDIO_RATE_RANGE = (16000, 48000)
DURATION_TOLERANCE_S = 2.0

_ORDINAL_CODES = {
    "positive": ImpactValue.POSITIVE,
    "neutral": ImpactValue.NEUTRAL,
    "negative": ImpactValue.NEGATIVE,
}
_MARKER_CODES = {4: ImpactValue.EOI_POSITIVE, 5: ImpactValue.EOI_NEGATIVE}


def _check_rate(rate, origin: str) -> None:
    lo, hi = AUDIO_RATE_RANGE
    if not (lo <= rate <= hi):
        raise RateOutOfRange(f"{origin}: sample rate {rate} outside [{lo}, {hi}] Hz")


def _read_manifest(bundle_dir: Path) -> dict:
    path = bundle_dir / MANIFEST_NAME
    if not path.is_file():
        raise MissingManifest(str(bundle_dir))
    try:
        manifest = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise MalformedStream(MANIFEST_NAME, message=str(exc)) from exc
    for key in ("session_id", "participant_id", "scenario_id", "duration_s", "files"):
        if key not in manifest:
            raise MalformedStream(MANIFEST_NAME, message=f"missing key {key!r}")
    scenario = manifest["scenario_id"]
    if not isinstance(scenario, int) or not 1 <= scenario <= 4:
        raise MalformedStream(MANIFEST_NAME, message=f"scenario_id must be 1..4, got {scenario!r}")
    duration = manifest["duration_s"]
    if not isinstance(duration, (int, float)) or duration <= 0:
        raise MalformedStream(MANIFEST_NAME, message=f"duration_s must be positive, got {duration!r}")
    return manifest


def _resolve(bundle_dir: Path, name: str) -> Path:
    path = bundle_dir / name
    if not path.is_file():
        raise MalformedStream(name, message="declared in manifest but file is missing")
    return path


def _read_events(path: Path, allow: str) -> EventStream:
    """Parse a JSONL event file; `allow` is "ordinal" or "marker"."""
    events: list[Event] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
                t = float(record["t"])
                code = record["v"]
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                raise MalformedStream(path.name, lineno, str(exc)) from exc
            if allow == "ordinal":
                value = _ORDINAL_CODES.get(code)
            else:
                value = _MARKER_CODES.get(code)
            if value is None:
                raise MalformedStream(path.name, lineno, f"unexpected value {code!r}")
            events.append(Event(t, value))
    try:
        return EventStream(events)
    except NonMonotonicTimestamps as exc:
        raise NonMonotonicTimestamps(f"{path.name}: {exc}") from exc


def _read_emotions(path: Path) -> EmotionFrames:
    emap = canonical_map()
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n").split(",")
        if header[:2] != ["frame", "t_s"] or set(header[2:]) != set(emap.names):
            raise MalformedStream(path.name, 1, "header must be frame,t_s,<48 emotion names>")
        # columns may come in any order; rows are re-indexed to canonical order
        order = [header[2:].index(name) for name in emap.names]
        times: list[float] = []
        rows: list[list[float]] = []
        for lineno, line in enumerate(fh, start=2):
            line = line.strip()
            if not line:
                continue
            cells = line.split(",")
            if len(cells) != len(header):
                raise MalformedStream(path.name, lineno, f"expected {len(header)} columns")
            try:
                t = float(cells[1])
                probs = [float(v) for v in cells[2:]]
            except ValueError as exc:
                raise MalformedStream(path.name, lineno, str(exc)) from exc
            if any(p < 0.0 or p > 1.0 for p in probs):
                raise MalformedStream(path.name, lineno, "probability outside [0, 1]")
            if times and t < times[-1]:
                raise MalformedStream(path.name, lineno, "frame times must not decrease")
            times.append(t)
            rows.append([probs[i] for i in order])
    probs_arr = np.array(rows, dtype=np.float64) if rows else np.zeros((0, len(emap.names)))
    return EmotionFrames(times=np.array(times), probs=probs_arr, names=emap.names)


def _read_survey(path: Path) -> SurveyResponses:
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise MalformedStream(path.name, message=str(exc)) from exc
    def item(key, optional=False):
        if key not in data:
            if optional:
                return None
            raise MalformedStream(path.name, message=f"missing key {key!r}")
        value = data[key]
        if not isinstance(value, (int, float)) or not 1 <= value <= 10:
            raise MalformedStream(path.name, message=f"{key} must be in [1, 10], got {value!r}")
        return float(value)
    return SurveyResponses(
        inhabiter_item1=item("survey_i_item1"),
        inhabiter_item2=item("survey_i_item2"),
        participant_item=item("survey_p"),
        self_estimate=item("self_estimate", optional=True),
    )


def _read_audio(path: Path) -> AudioTrack:
    samples, rate = wavio.read_wav(path)
    _check_rate(rate, path.name)
    return AudioTrack(samples=samples, sample_rate=rate)


def ingest_bundle(path: str | Path) -> Session:
    """Parse a session bundle directory into a Session.

    Raises on structural problems (missing manifest, malformed or missing
    declared files, out-of-range sample rates, non-monotonic timestamps);
    semantic issues are left to validate_session.
    """
    bundle_dir = Path(path)
    manifest = _read_manifest(bundle_dir)
    files = manifest["files"]
    rates = manifest.get("sample_rates", {})
    if "participant_audio_hz" in rates:
        _check_rate(rates["participant_audio_hz"], "manifest sample_rates.participant_audio_hz")

    participant_audio = impact = survey = None
    inhabiter_audio = emotions = eoi = self_events = None
    if files.get("participant_audio"):
        participant_audio = _read_audio(_resolve(bundle_dir, files["participant_audio"]))
    if files.get("inhabiter_audio"):
        inhabiter_audio = _read_audio(_resolve(bundle_dir, files["inhabiter_audio"]))
    if files.get("impact"):
        impact = _read_events(_resolve(bundle_dir, files["impact"]), allow="ordinal")
    if files.get("self"):
        self_events = _read_events(_resolve(bundle_dir, files["self"]), allow="ordinal")
    if files.get("eoi"):
        eoi = _read_events(_resolve(bundle_dir, files["eoi"]), allow="marker")
    if files.get("emotions"):
        emotions = _read_emotions(_resolve(bundle_dir, files["emotions"]))
    if files.get("survey"):
        survey = _read_survey(_resolve(bundle_dir, files["survey"]))

    return Session(
        session_id=str(manifest["session_id"]),
        participant_id=str(manifest["participant_id"]),
        scenario_id=manifest["scenario_id"],
        duration=float(manifest["duration_s"]),
        participant_audio=participant_audio,
        impact_events=impact,
        survey=survey,
        inhabiter_audio=inhabiter_audio,
        emotion_frames=emotions,
        eoi_events=eoi,
        self_events=self_events,
        manifest=manifest,
    )


def validate_session(session: Session) -> ValidationReport:
    """Check a parsed session's integrity; problems become report entries."""
    report = ValidationReport(session_id=session.session_id)
    if session.participant_audio is None:
        report.add("fatal", "missing_stream", "participant audio missing")
    if session.impact_events is None:
        report.add("fatal", "missing_stream", "rating event stream missing")
    if session.survey is None:
        report.add("fatal", "missing_stream", "survey responses missing")
    if not 1 <= session.scenario_id <= 4:
        report.add("fatal", "bad_scenario", f"scenario_id {session.scenario_id} outside 1..4")
    if session.duration <= 0:
        report.add("fatal", "bad_duration", f"duration {session.duration} not positive")

    if session.participant_audio is not None and session.duration > 0:
        skew = abs(session.participant_audio.duration - session.duration)
        if skew > DURATION_TOLERANCE_S:
            report.add("fatal", "duration_mismatch",
                       f"audio length differs from manifest duration by {skew:.2f} s")
        declared = (session.manifest or {}).get("sample_rates", {}).get("participant_audio_hz")
        if declared is not None and declared != session.participant_audio.sample_rate:
            report.add("warning", "rate_mismatch",
                       f"manifest declares {declared} Hz, wav header says "
                       f"{session.participant_audio.sample_rate} Hz")

    for label, stream in (("impact", session.impact_events),
                          ("eoi", session.eoi_events),
                          ("self", session.self_events)):
        if stream is None:
            continue
        for event in stream:
            if event.t < 0 or event.t > session.duration:
                report.add("fatal", "timestamp_range",
                           f"{label} event at t={event.t} outside [0, {session.duration}]")
                break

    if session.impact_events is not None and len(session.impact_events) == 0:
        report.add("warning", "empty_stream", "rating event stream has no events")
    if session.self_events is None:
        report.add("warning", "missing_optional", "self-assessment stream absent")
    if session.eoi_events is None:
        report.add("warning", "missing_optional", "events-of-interest stream absent")
    if session.emotion_frames is None:
        report.add("warning", "missing_optional", "emotion frames absent")
    if session.inhabiter_audio is None:
        report.add("warning", "missing_optional", "inhabiter audio absent")
    return report


# --- serialization ---

_CANONICAL_FILES = {
    "participant_audio": "participant.wav",
    "inhabiter_audio": "inhabiter.wav",
    "emotions": "emotions.csv",
    "impact": "impact.jsonl",
    "eoi": "eoi.jsonl",
    "self": "self.jsonl",
    "survey": "survey.json",
}


def _event_record(event: Event) -> dict:
    return {"t": event.t, "v": event.value.value}


def _write_events(path: Path, stream: EventStream) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for event in stream:
            fh.write(json.dumps(_event_record(event)) + "\n")


def _write_emotions(path: Path, frames: EmotionFrames) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("frame,t_s," + ",".join(frames.names) + "\n")
        for k, (t, row) in enumerate(zip(frames.times, frames.probs)):
            cells = [str(k), repr(float(t))] + [repr(float(p)) for p in row]
            fh.write(",".join(cells) + "\n")


def write_bundle(session: Session, path: str | Path) -> Path:
    """Serialize a session as a bundle directory with canonical file names."""
    bundle_dir = Path(path)
    bundle_dir.mkdir(parents=True, exist_ok=True)
    files: dict[str, str] = {}
    sample_rates: dict = {}

    if session.participant_audio is not None:
        files["participant_audio"] = _CANONICAL_FILES["participant_audio"]
        wavio.write_wav(bundle_dir / files["participant_audio"],
                        session.participant_audio.samples,
                        session.participant_audio.sample_rate)
        sample_rates["participant_audio_hz"] = session.participant_audio.sample_rate
    if session.inhabiter_audio is not None:
        files["inhabiter_audio"] = _CANONICAL_FILES["inhabiter_audio"]
        wavio.write_wav(bundle_dir / files["inhabiter_audio"],
                        session.inhabiter_audio.samples,
                        session.inhabiter_audio.sample_rate)
    if session.emotion_frames is not None:
        files["emotions"] = _CANONICAL_FILES["emotions"]
        _write_emotions(bundle_dir / files["emotions"], session.emotion_frames)
        if len(session.emotion_frames) > 1:
            span = session.emotion_frames.times[-1] - session.emotion_frames.times[0]
            if span > 0:
                sample_rates["emotion_fps"] = round((len(session.emotion_frames) - 1) / span, 3)
    if session.impact_events is not None:
        files["impact"] = _CANONICAL_FILES["impact"]
        _write_events(bundle_dir / files["impact"], session.impact_events)
    if session.eoi_events is not None:
        files["eoi"] = _CANONICAL_FILES["eoi"]
        _write_events(bundle_dir / files["eoi"], session.eoi_events)
    if session.self_events is not None:
        files["self"] = _CANONICAL_FILES["self"]
        _write_events(bundle_dir / files["self"], session.self_events)
    if session.survey is not None:
        files["survey"] = _CANONICAL_FILES["survey"]
        survey = {
            "survey_i_item1": session.survey.inhabiter_item1,
            "survey_i_item2": session.survey.inhabiter_item2,
            "survey_p": session.survey.participant_item,
        }
        if session.survey.self_estimate is not None:
            survey["self_estimate"] = session.survey.self_estimate
        (bundle_dir / files["survey"]).write_text(
            json.dumps(survey, indent=2, sort_keys=True) + "\n", encoding="utf-8")

    manifest = {
        "session_id": session.session_id,
        "participant_id": session.participant_id,
        "scenario_id": session.scenario_id,
        "duration_s": session.duration,
        "files": files,
        "sample_rates": sample_rates,
    }
    (bundle_dir / MANIFEST_NAME).write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return bundle_dir


def find_bundles(root: str | Path) -> list[Path]:
    """Discover bundle directories under a corpus root by manifest presence."""
    root = Path(root)
    found = [p.parent for p in root.glob(f"*/{MANIFEST_NAME}")]
    if (root / MANIFEST_NAME).is_file():
        found.append(root)
    return sorted(set(found))


def merge_self_annotations(bundle_dir: str | Path, events_path: str | Path) -> int:
    """Validate an exported self-assessment stream and merge it into a bundle.

    The stream must satisfy the event-stream schema (ordinal values, strictly
    increasing timestamps inside [0, duration]); on any violation the bundle
    is left untouched. Writes `self.jsonl` and the updated manifest via
    write-temp-then-rename.
    """
    bundle_dir = Path(bundle_dir)
    manifest = _read_manifest(bundle_dir)
    stream = _read_events(Path(events_path), allow="ordinal")
    duration = float(manifest["duration_s"])
    for event in stream:
        if event.t < 0 or event.t > duration:
            raise MalformedStream(Path(events_path).name,
                                  message=f"event at t={event.t} outside [0, {duration}]")

    target = bundle_dir / _CANONICAL_FILES["self"]
    tmp = target.with_suffix(".jsonl.tmp")
    _write_events(tmp, stream)
    os.replace(tmp, target)

    manifest["files"]["self"] = _CANONICAL_FILES["self"]
    manifest_tmp = bundle_dir / (MANIFEST_NAME + ".tmp")
    manifest_tmp.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n",
                            encoding="utf-8")
    os.replace(manifest_tmp, bundle_dir / MANIFEST_NAME)
    return len(stream)
