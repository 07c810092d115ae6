"""Command-line interface over a corpus of session bundles.

Exit codes: 0 success, 2 validation-fatal, 3 I/O failure, 4 bad arguments.
Failures print a machine-readable JSON object on stderr.
"""

from __future__ import annotations

import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Optional

import click

from . import bundle as bundle_mod
from . import emotion
from . import report as report_mod
from . import svm as svm_mod
from .audio.features import audio_feature_names, audio_feature_vector
from .config import AnalysisConfig, load_config
from .errors import (
    BundleError,
    ConvometricsError,
    EmptyDataset,
    IoFailure,
    SingleClass,
)
from .metrics import classify_success, survey_inhabiter

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_IO = 3
EXIT_USAGE = 4

MODES = ("full", "audio_only", "video_only", "top_selected")


@click.group()
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False),
              default=None, help="JSON config file; flags win over file values.")
@click.option("--workers", type=int, default=1, show_default=True,
              help="Session-level parallelism for feature extraction.")
@click.option("--seed", type=int, default=0, show_default=True,
              help="Only consumed by the synthetic-data generators in the test harness.")
@click.pass_context
def cli(ctx, config_path, workers, seed):
    ctx.obj = load_config(config_path, {"workers": workers, "seed": seed})


def _scan_corpus(root: str, config: AnalysisConfig) -> list[dict]:
    """Ingest and validate every bundle under the root; errors become entries."""
    entries = []
    for path in bundle_mod.find_bundles(root):
        entry: dict = {"path": str(path)}
        try:
            session = bundle_mod.ingest_bundle(path)
        except BundleError as exc:
            entry.update(session_id=path.name, usable=False,
                         issues=[{"severity": "fatal", "code": type(exc).__name__,
                                  "message": str(exc)}])
            entries.append(entry)
            continue
        validation = bundle_mod.validate_session(session)
        entry.update(
            session_id=session.session_id,
            usable=validation.usable,
            issues=[{"severity": i.severity, "code": i.code, "message": i.message}
                    for i in validation.issues],
        )
        entries.append(entry)
    entries.sort(key=lambda e: e["session_id"])
    return entries


def _emit(payload: dict, out: Optional[str]) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        click.echo(text, nl=False)


@cli.command()
@click.argument("root", type=click.Path(exists=True, file_okay=False))
@click.option("--out", type=click.Path(), default=None, help="Write the index here instead of stdout.")
@click.pass_obj
def ingest(config: AnalysisConfig, root, out):
    """Discover and parse bundles; emit the corpus index."""
    entries = _scan_corpus(root, config)
    _emit({"config": config.to_dict(), "root": str(root),
           "sessions": [{k: e[k] for k in ("session_id", "path", "usable")} for e in entries]},
          out)


@cli.command()
@click.argument("root", type=click.Path(exists=True, file_okay=False))
@click.option("--out", type=click.Path(), default=None)
@click.pass_obj
def validate(config: AnalysisConfig, root, out):
    """Full validation summary; unusable bundles are reported, not fatal."""
    entries = _scan_corpus(root, config)
    _emit({
        "config": config.to_dict(),
        "root": str(root),
        "n_sessions": len(entries),
        "n_usable": sum(e["usable"] for e in entries),
        "n_unusable": sum(not e["usable"] for e in entries),
        "sessions": entries,
    }, out)


def _featurize_bundle(path: str, config: AnalysisConfig, want_audio: bool, want_video: bool):
    """Worker: one bundle to one feature row. Returns None for unusable sessions."""
    session = bundle_mod.ingest_bundle(path)
    if not bundle_mod.validate_session(session).usable:
        return None
    row: dict = {"session_id": session.session_id}
    timing = {"audio_s": 0.0, "video_s": 0.0}
    if want_audio:
        t0 = time.perf_counter()
        vector = audio_feature_vector(session.participant_audio, config)
        timing["audio_s"] = time.perf_counter() - t0
        row["audio"] = vector.values
        row["usable_audio"] = vector.usable
    if want_video:
        t0 = time.perf_counter()
        if session.emotion_frames is not None and len(session.emotion_frames) > 0:
            row["video"] = emotion.video_feature_vector(
                session.emotion_frames, k_sigma=config.ellipse_k_sigma)
        else:
            row["video"] = dict.fromkeys(emotion.video_feature_names())
        timing["video_s"] = time.perf_counter() - t0
    survey = survey_inhabiter(session.survey.inhabiter_item1, session.survey.inhabiter_item2)
    row["label"] = classify_success(survey).value
    row["timing"] = timing
    return row


def _format_cell(value) -> str:
    return "" if value is None else repr(float(value))


@cli.command()
@click.argument("root", type=click.Path(exists=True, file_okay=False))
@click.option("--out", type=click.Path(), required=True, help="Features CSV path.")
@click.option("--mode", type=click.Choice(["full", "audio_only", "video_only"]),
              default="full", show_default=True)
@click.option("--labels-out", type=click.Path(), default=None,
              help="Also write a labels CSV (session_id, success).")
@click.option("--timings-out", type=click.Path(), default=None,
              help="Record per-session extraction wall time (non-deterministic).")
@click.pass_obj
def features(config: AnalysisConfig, root, out, mode, labels_out, timings_out):
    """Extract per-session feature vectors into a CSV."""
    want_audio = mode in ("full", "audio_only")
    want_video = mode in ("full", "video_only")
    paths = [str(p) for p in bundle_mod.find_bundles(root)]
    if config.workers > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            rows = list(pool.map(_featurize_bundle, paths,
                                 [config] * len(paths), [want_audio] * len(paths),
                                 [want_video] * len(paths)))
    else:
        rows = [_featurize_bundle(p, config, want_audio, want_video) for p in paths]
    rows = sorted((r for r in rows if r is not None), key=lambda r: r["session_id"])

    columns = (audio_feature_names() if want_audio else []) + \
              (emotion.video_feature_names() if want_video else [])
    with open(out, "w", encoding="utf-8", newline="") as fh:
        fh.write(",".join(["session_id"] + columns) + "\n")
        for row in rows:
            merged = {}
            merged.update(row.get("audio", {}))
            merged.update(row.get("video", {}))
            fh.write(",".join([row["session_id"]] +
                              [_format_cell(merged.get(c)) for c in columns]) + "\n")
    if labels_out:
        with open(labels_out, "w", encoding="utf-8", newline="") as fh:
            fh.write("session_id,success\n")
            for row in rows:
                fh.write(f"{row['session_id']},{row['label']}\n")
    if timings_out:
        with open(timings_out, "w", encoding="utf-8", newline="") as fh:
            fh.write("session_id,audio_s,video_s\n")
            for row in rows:
                fh.write(f"{row['session_id']},{row['timing']['audio_s']:.6f},"
                         f"{row['timing']['video_s']:.6f}\n")
    click.echo(f"wrote {len(rows)} usable sessions to {out}", err=True)


@cli.command()
@click.argument("features_csv", type=click.Path(exists=True, dir_okay=False))
@click.argument("labels_csv", type=click.Path(exists=True, dir_okay=False))
@click.option("--out", type=click.Path(), required=True, help="Model JSON path.")
@click.option("-c", "--cost", "cost", type=float, default=None,
              help="Hinge penalty C; falls back to the config value.")
@click.pass_obj
def train(config: AnalysisConfig, features_csv, labels_csv, out, cost):
    """Fit the linear classifier on all rows with complete features."""
    dataset = svm_mod.load_dataset(features_csv, labels_csv)
    complete, dropped = dataset.select(dataset.feature_names)
    if len(complete) == 0:
        raise EmptyDataset("no rows with complete features")
    c_value = cost if cost is not None else config.svm_c
    model = svm_mod.LinearHingeSVC(C=c_value).fit(complete.X, complete.y)
    payload = {
        "config": config.to_dict(),
        "C": c_value,
        "feature_names": complete.feature_names,
        "classes": [str(c) for c in model.classes_],
        "coef": list(model.coef_),
        "intercept": model.intercept_,
        "scaler_mean": list(model.scaler_mean_),
        "scaler_std": list(model.scaler_std_),
        "n_rows": len(complete),
        "dropped_rows": dropped,
    }
    Path(out).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n",
                         encoding="utf-8")
    click.echo(f"trained on {len(complete)} rows ({len(dropped)} dropped)", err=True)


def _read_timings(path: Optional[str]) -> Optional[dict]:
    if path is None:
        return None
    timings = {}
    with open(path, encoding="utf-8") as fh:
        header = fh.readline()
        for line in fh:
            sid, audio_s, video_s = line.strip().split(",")
            timings[sid] = {"audio_s": float(audio_s), "video_s": float(video_s)}
    return timings


@cli.command()
@click.argument("features_csv", type=click.Path(exists=True, dir_okay=False))
@click.argument("labels_csv", type=click.Path(exists=True, dir_okay=False))
@click.option("--outdir", type=click.Path(), required=True)
@click.option("--mode", "modes", type=click.Choice(MODES), multiple=True,
              default=MODES, show_default=True)
@click.option("--timings", type=click.Path(exists=True, dir_okay=False), default=None,
              help="Per-session extraction timing CSV from `features --timings-out`.")
@click.option("-c", "--cost", "cost", type=float, default=None)
@click.pass_obj
def evaluate(config: AnalysisConfig, features_csv, labels_csv, outdir, modes, timings, cost):
    """Leave-one-out comparison across feature modes with ROC/AUC per mode."""
    dataset = svm_mod.load_dataset(features_csv, labels_csv)
    c_value = cost if cost is not None else config.svm_c
    reports = svm_mod.evaluate_modes(
        dataset,
        audio_columns=audio_feature_names(),
        video_columns=emotion.video_feature_names(),
        modes=list(modes), C=c_value,
        top_k=config.select_top_k, corr_max=config.select_corr_max,
        prep_seconds=_read_timings(timings),
    )
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    summary = {"config": config.to_dict(), "C": c_value, "modes": {}}
    for mode_report in reports:
        summary["modes"][mode_report.mode] = {
            "n_rows": mode_report.n_rows,
            "dropped_rows": mode_report.dropped,
            "accuracy": mode_report.accuracy,
            "auc": mode_report.auc,
            "n_features": len(mode_report.feature_names),
            "feature_names": mode_report.feature_names,
            "prep_wall_s": mode_report.prep_wall_s,
        }
        roc_path = outdir / f"roc_{mode_report.mode}.csv"
        with open(roc_path, "w", encoding="utf-8", newline="") as fh:
            fh.write("fpr,tpr\n")
            for fpr, tpr in mode_report.roc_points:
                fh.write(f"{fpr!r},{tpr!r}\n")
    (outdir / "evaluation.json").write_text(
        json.dumps(summary, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    click.echo(f"evaluated modes: {', '.join(modes)}", err=True)


@cli.command()
@click.argument("root", type=click.Path(exists=True, file_okay=False))
@click.option("--outdir", type=click.Path(), required=True)
@click.pass_obj
def report(config: AnalysisConfig, root, outdir):
    """Score the corpus and write the statistics report bundle."""
    sessions = []
    for path in bundle_mod.find_bundles(root):
        try:
            session = bundle_mod.ingest_bundle(path)
        except BundleError:
            continue
        if bundle_mod.validate_session(session).usable:
            sessions.append(session)
    records = [report_mod.session_record(s, rate=config.frame_rate_hz) for s in sessions]
    report_mod.emit_report(outdir, records, config, sessions=sessions)
    if not records:
        raise SingleClass("empty cohort: report written with empty sections")
    click.echo(f"report for {len(records)} sessions in {outdir}", err=True)


@cli.command("merge-annotations")
@click.argument("bundle_dir", type=click.Path(exists=True, file_okay=False))
@click.option("--events", "events_path", type=click.Path(exists=True, dir_okay=False),
              required=True, help="Self-assessment JSONL exported by the rating tool.")
def merge_annotations(bundle_dir, events_path):
    """Validate an exported self-assessment stream and write it into a bundle."""
    count = bundle_mod.merge_self_annotations(bundle_dir, events_path)
    click.echo(f"merged {count} events into {bundle_dir}", err=True)


def main(argv: Optional[list[str]] = None) -> int:
    """Entry point with the documented exit-code contract."""
    try:
        cli.main(args=argv, standalone_mode=False)
        return EXIT_OK
    except click.UsageError as exc:
        _fail("usage", str(exc))
        return EXIT_USAGE
    except (BundleError, SingleClass, EmptyDataset) as exc:
        _fail(type(exc).__name__, str(exc))
        return EXIT_VALIDATION
    except (IoFailure, OSError) as exc:
        _fail(type(exc).__name__, str(exc))
        return EXIT_IO
    except ConvometricsError as exc:
        _fail(type(exc).__name__, str(exc))
        return EXIT_VALIDATION
    except click.exceptions.Exit as exc:
        return exc.exit_code


def _fail(code: str, message: str) -> None:
    sys.stderr.write(json.dumps({"error": code, "message": message}) + "\n")


if __name__ == "__main__":
    sys.exit(main())
