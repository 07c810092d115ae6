"""Resolved analysis configuration with flags > config file > defaults precedence."""

from __future__ import annotations

import json
from dataclasses import dataclass, asdict, fields
from pathlib import Path

from .errors import IoFailure


@dataclass(frozen=True)
class AnalysisConfig:
    # event-stream alignment
    frame_rate_hz: float = 30.0
    # voice activity detection (threshold is dB relative to the track peak)
    vad_threshold_db: float = -35.0
    vad_hangover_ms: float = 150.0
    # pitch analysis
    pitch_floor_hz: float = 60.0
    pitch_ceiling_hz: float = 500.0
    pitch_window_s: float = 0.5
    # speech timing
    pause_min_s: float = 0.3
    syllable_dip_db: float = 2.0
    # preprocessing
    highpass_cutoff_hz: float = 60.0
    # emotion-space analytics
    ellipse_k_sigma: float = 2.0
    # classifier
    svm_c: float = 1.0
    select_top_k: int = 20
    select_corr_max: float = 0.9
    # harness-only knob: consumed by the synthetic-data generators, never by analysis
    seed: int = 0
    workers: int = 1

    def to_dict(self) -> dict:
        return asdict(self)


# config-file keys use dotted section.name form
_KEY_MAP = {
    "frame.rate_hz": "frame_rate_hz",
    "vad.threshold_db": "vad_threshold_db",
    "vad.hangover_ms": "vad_hangover_ms",
    "pitch.floor_hz": "pitch_floor_hz",
    "pitch.ceiling_hz": "pitch_ceiling_hz",
    "pitch.window_s": "pitch_window_s",
    "pause.min_s": "pause_min_s",
    "syllable.dip_db": "syllable_dip_db",
    "highpass.cutoff_hz": "highpass_cutoff_hz",
    "ellipse.k_sigma": "ellipse_k_sigma",
    "svm.c": "svm_c",
    "select.top_k": "select_top_k",
    "select.corr_max": "select_corr_max",
}


def _flatten(tree: dict, prefix: str = "") -> dict:
    flat = {}
    for key, value in tree.items():
        name = f"{prefix}{key}"
        if isinstance(value, dict):
            flat.update(_flatten(value, f"{name}."))
        else:
            flat[name] = value
    return flat


def load_config(path: str | Path | None = None, overrides: dict | None = None) -> AnalysisConfig:
    """Build a config from defaults, an optional JSON file, and explicit overrides.

    The file may use either nested sections ({"vad": {"threshold_db": -38}})
    or dotted keys ({"vad.threshold_db": -38}). Overrides use attribute names
    and win over the file.
    """
    values: dict = {}
    if path is not None:
        try:
            tree = json.loads(Path(path).read_text(encoding="utf-8"))
        except OSError as exc:
            raise IoFailure(f"cannot read config file {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise IoFailure(f"config file {path} is not valid JSON: {exc}") from exc
        known = {f.name for f in fields(AnalysisConfig)}
        for key, value in _flatten(tree).items():
            attr = _KEY_MAP.get(key, key.replace(".", "_"))
            if attr not in known:
                raise IoFailure(f"unknown config key {key!r}")
            values[attr] = value
    if overrides:
        values.update({k: v for k, v in overrides.items() if v is not None})
    return AnalysisConfig(**values)
