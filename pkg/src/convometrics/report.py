"""Cohort scoring and report-bundle emission.

Turns parsed sessions into per-session metric records and writes the
plot-ready report files: the JSON summary, per-scenario correlations,
group-by-scenario means, the success transition table, the self-awareness
breakdown, and per-session emotion trajectories.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Optional, Sequence

from . import emotion
from .config import AnalysisConfig
from .errors import (
    ConstantInput,
    IoFailure,
    LengthMismatch,
    NoCompleteParticipants,
    ZeroMargin,
)
from .metrics import (
    classify_success,
    estimator_category,
    impact_score,
    survey_inhabiter,
    survey_participant,
)
from .sessions import Session, resample_events
from .stats import (
    SCENARIOS,
    SessionRecord,
    chi_square_2x2,
    estimator_breakdown,
    group_summary,
    pearson,
    stepdown_adjust,
    success_transition_table,
)


def session_record(session: Session, rate: float = 30.0) -> SessionRecord:
    """Score one usable session into the record the statistics consume."""
    series = resample_events(session.impact_events, session.duration, rate)
    score = impact_score(series)
    survey_i = survey_inhabiter(session.survey.inhabiter_item1,
                                session.survey.inhabiter_item2)
    survey_p = survey_participant(session.survey.participant_item)
    record = SessionRecord(
        session_id=session.session_id,
        participant_id=session.participant_id,
        scenario_id=session.scenario_id,
        impact_value=score.value,
        survey_i=survey_i.value,
        survey_p=survey_p.value,
        success=classify_success(survey_i),
        self_estimate=session.survey.self_estimate,
    )
    if session.survey.self_estimate is not None:
        record.estimator_class = estimator_category(session.survey.self_estimate, survey_i)
    record.dwell = {"pos": score.positive_s, "neu": score.neutral_s, "neg": score.negative_s}
    return record


def metric_record_json(record: SessionRecord) -> dict:
    return {
        "session_id": record.session_id,
        "scenario_id": record.scenario_id,
        "impact_score": record.impact_value,
        "dwell_s": record.dwell,
        "survey_i": record.survey_i,
        "survey_p": record.survey_p,
        "success": record.success.value,
        "estimator_class": record.estimator_class.value if record.estimator_class else None,
    }


def build_report(records: Sequence[SessionRecord], config: AnalysisConfig) -> dict:
    """Assemble the full statistics summary; degenerate sections become nulls."""
    report: dict = {
        "config": config.to_dict(),
        "n_sessions": len(records),
        "correlations": {},
        "chi_square": None,
        "transition_table": None,
        "group_means": [],
        "estimator_breakdown": {},
    }
    # score-vs-survey correlation per scenario, with family-wise adjustment
    raw_p: list[float] = []
    scenario_rows = []
    for scenario in SCENARIOS:
        xs = [r.impact_value for r in records if r.scenario_id == scenario]
        ys = [r.survey_i for r in records if r.scenario_id == scenario]
        try:
            result = pearson(xs, ys)
        except (ConstantInput, LengthMismatch):
            scenario_rows.append((scenario, None))
            continue
        scenario_rows.append((scenario, result))
        raw_p.append(result.p_two_sided)
    adjusted = iter(stepdown_adjust(raw_p))
    for scenario, result in scenario_rows:
        if result is None:
            report["correlations"][str(scenario)] = None
        else:
            report["correlations"][str(scenario)] = {
                "r": result.r, "n": result.n,
                "p": result.p_two_sided, "p_adjusted": next(adjusted),
            }
    try:
        table = success_transition_table(records)
        report["transition_table"] = {"a": table.a, "b": table.b,
                                      "c": table.c, "d": table.d, "n": table.n}
        report["chi_square"] = chi_square_2x2(table)
    except (NoCompleteParticipants, ZeroMargin):
        pass
    try:
        report["group_means"] = [
            {"group": cell.group, "scenario": cell.scenario,
             "mean": cell.mean, "se": cell.se, "n": cell.n}
            for cell in group_summary(records)
        ]
    except NoCompleteParticipants:
        pass
    report["estimator_breakdown"] = estimator_breakdown(records)
    return report


def _write_json(path: Path, payload) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def emit_report(outdir: str | Path, records: Sequence[SessionRecord],
                config: AnalysisConfig,
                sessions: Optional[Sequence[Session]] = None,
                evaluation: Optional[dict] = None) -> list[Path]:
    """Write the report bundle; returns the paths written.

    `sessions` (when given) supplies emotion frames for trajectory exports;
    `evaluation` (when given) is folded into report.json verbatim.
    """
    outdir = Path(outdir)
    try:
        outdir.mkdir(parents=True, exist_ok=True)
        report = build_report(records, config)
        if evaluation is not None:
            report["evaluation"] = evaluation
        written = [outdir / "report.json"]
        _write_json(written[0], report)

        path = outdir / "session_metrics.jsonl"
        with open(path, "w", encoding="utf-8") as fh:
            for record in sorted(records, key=lambda r: r.session_id):
                fh.write(json.dumps(metric_record_json(record), sort_keys=True) + "\n")
        written.append(path)

        path = outdir / "correlations.csv"
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["scenario", "r", "n", "p", "p_adjusted"])
            for scenario in SCENARIOS:
                row = report["correlations"].get(str(scenario))
                if row is None:
                    writer.writerow([scenario, "", "", "", ""])
                else:
                    writer.writerow([scenario, repr(row["r"]), row["n"],
                                     repr(row["p"]), repr(row["p_adjusted"])])
        written.append(path)

        path = outdir / "group_means.csv"
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["group", "scenario", "mean", "se", "n"])
            for cell in report["group_means"]:
                writer.writerow([cell["group"], cell["scenario"], repr(cell["mean"]),
                                 "" if cell["se"] is None else repr(cell["se"]), cell["n"]])
        written.append(path)

        path = outdir / "transition_table.csv"
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["", "final_successful", "final_unsuccessful"])
            table = report["transition_table"]
            if table is not None:
                writer.writerow(["initial_successful", table["a"], table["b"]])
                writer.writerow(["initial_unsuccessful", table["c"], table["d"]])
        written.append(path)

        path = outdir / "estimator_breakdown.csv"
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["category", "n", "success_rate"])
            for category, row in report["estimator_breakdown"].items():
                writer.writerow([category, row["n"], repr(row["success_rate"])])
        written.append(path)

        if sessions:
            emap = emotion.canonical_map()
            trajdir = outdir / "trajectories"
            for session in sorted(sessions, key=lambda s: s.session_id):
                if session.emotion_frames is None or len(session.emotion_frames) == 0:
                    continue
                trajdir.mkdir(exist_ok=True)
                trajectory = emotion.session_trajectory(session.emotion_frames, emap)
                csv_path = trajdir / f"{session.session_id}.csv"
                emotion.export_trajectory(trajectory, csv_path,
                                          csv_path.with_suffix(".json"),
                                          k_sigma=config.ellipse_k_sigma)
                written.append(csv_path)
                written.append(csv_path.with_suffix(".json"))
    except OSError as exc:
        raise IoFailure(str(exc)) from exc
    return written
