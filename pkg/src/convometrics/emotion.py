"""Circumplex emotion-space analytics.

Maps per-frame probabilities over the 48 detected emotions onto the 2D
valence/activation plane and derives the session-level geometry used for
analysis and plotting: trajectories, centers of mass, principal components,
confidence ellipses, and cluster occupancy profiles.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Mapping, Optional

import numpy as np

from .errors import DegenerateInput, EmptyInput, OutOfRange, UnknownEmotionName
from .sessions import EmotionFrames

_ASSET = "data/emotion_space_v1.json"


class EmotionMap:
    """The fixed 48-emotion to 2D-coordinate mapping."""

    def __init__(self, entries: list[tuple[str, float, float]]):
        self.names: tuple[str, ...] = tuple(name for name, _, _ in entries)
        if len(set(self.names)) != len(self.names):
            raise UnknownEmotionName("duplicate emotion name in map")
        self.coords = np.array([[x, y] for _, x, y in entries], dtype=np.float64)
        self._index = {name: i for i, name in enumerate(self.names)}

    def __len__(self) -> int:
        return len(self.names)

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise UnknownEmotionName(name) from None

    def coordinate(self, name: str) -> tuple[float, float]:
        x, y = self.coords[self.index(name)]
        return float(x), float(y)

    @classmethod
    def from_csv(cls, path: str | Path) -> "EmotionMap":
        """Load a user-supplied (name,x,y) CSV override."""
        entries = []
        with open(path, newline="", encoding="utf-8") as fh:
            for row in csv.reader(fh):
                if not row or row[0].strip().lower() in ("name", "emotion"):
                    continue
                entries.append((row[0], float(row[1]), float(row[2])))
        return cls(entries)


class ClusterDefs:
    """Named emotion clusters; an emotion may belong to several clusters."""

    def __init__(self, clusters: Mapping[str, list[str]]):
        self.clusters: dict[str, tuple[str, ...]] = {
            name: tuple(members) for name, members in clusters.items()
        }

    def __iter__(self):
        return iter(self.clusters)

    def members(self, name: str) -> tuple[str, ...]:
        return self.clusters[name]

    @classmethod
    def from_json(cls, path: str | Path) -> "ClusterDefs":
        return cls(json.loads(Path(path).read_text(encoding="utf-8")))


@lru_cache(maxsize=1)
def _load_asset() -> dict:
    text = resources.files("convometrics").joinpath(_ASSET).read_text(encoding="utf-8")
    return json.loads(text)


def canonical_map() -> EmotionMap:
    return EmotionMap([(n, x, y) for n, x, y in _load_asset()["coordinates"]])


def canonical_clusters() -> ClusterDefs:
    return ClusterDefs(_load_asset()["clusters"])


@dataclass
class Trajectory:
    """Per-frame emotion vectors with time normalized onto [0, 1]."""

    t_norm: np.ndarray  # (n,)
    points: np.ndarray  # (n, 2)

    def __len__(self) -> int:
        return len(self.t_norm)


@dataclass
class PcaResult:
    mean: np.ndarray               # (2,)
    components: np.ndarray         # (2, 2), rows orthonormal, major first
    explained_variance: np.ndarray  # (2,), descending, sample covariance (n-1)


@dataclass
class Ellipse:
    center: np.ndarray      # (2,)
    semi_axes: np.ndarray   # (2,), major first
    angle: float            # radians, orientation of the major axis

    @property
    def thin(self) -> bool:
        return self.semi_axes[1] <= 1e-12 * max(self.semi_axes[0], 1.0)


def _as_prob_vector(frame, emap: EmotionMap) -> np.ndarray:
    if isinstance(frame, Mapping):
        p = np.zeros(len(emap))
        for name, value in frame.items():
            p[emap.index(name)] = value
        return p
    p = np.asarray(frame, dtype=np.float64)
    if p.shape != (len(emap),):
        raise UnknownEmotionName(
            f"frame has {p.shape} probabilities, map has {len(emap)} emotions"
        )
    return p


def emotion_vector(frame, emap: EmotionMap) -> np.ndarray:
    """Probability-weighted sum of emotion coordinates for one frame.

    `frame` is either a name->probability mapping or a vector aligned with the
    map's name order.
    """
    p = _as_prob_vector(frame, emap)
    return p @ emap.coords


def session_trajectory(frames: EmotionFrames, emap: EmotionMap) -> Trajectory:
    if len(frames) == 0:
        raise EmptyInput("no emotion frames")
    if frames.names != emap.names:
        raise UnknownEmotionName("frame columns do not match map names")
    points = frames.probs @ emap.coords
    n = len(frames)
    if n == 1:
        t_norm = np.zeros(1)
    else:
        span = frames.times[-1] - frames.times[0]
        if span > 0:
            t_norm = (frames.times - frames.times[0]) / span
        else:
            t_norm = np.linspace(0.0, 1.0, n)
    return Trajectory(t_norm=t_norm, points=points)


def center_of_mass(trajectory: Trajectory) -> np.ndarray:
    if len(trajectory) == 0:
        raise EmptyInput("empty trajectory")
    return trajectory.points.mean(axis=0)


def _fix_sign(component: np.ndarray) -> np.ndarray:
    # resolve eigenvector sign ambiguity: largest-magnitude coordinate positive
    i = int(np.argmax(np.abs(component)))
    return -component if component[i] < 0 else component


def pca2(trajectory: Trajectory) -> PcaResult:
    """Eigendecomposition of the 2x2 sample covariance of the trajectory points."""
    pts = trajectory.points
    if len(pts) < 2:
        raise DegenerateInput("need at least 2 points")
    mean = pts.mean(axis=0)
    centered = pts - mean
    if not np.any(np.abs(centered) > 0):
        raise DegenerateInput("all trajectory points identical")
    cov = centered.T @ centered / (len(pts) - 1)
    eigvals, eigvecs = np.linalg.eigh(cov)
    order = np.argsort(eigvals)[::-1]
    variance = np.clip(eigvals[order], 0.0, None)
    components = np.vstack([_fix_sign(eigvecs[:, i]) for i in order])
    return PcaResult(mean=mean, components=components, explained_variance=variance)


def confidence_ellipse(trajectory: Trajectory, k_sigma: float = 2.0) -> Ellipse:
    """Covariance ellipse centered on the trajectory's center of mass.

    Semi-axes are k_sigma standard deviations along the principal directions;
    collinear point sets yield a zero minor axis (`thin`), not an error.
    """
    if k_sigma <= 0:
        raise OutOfRange(f"k_sigma must be positive, got {k_sigma}")
    pca = pca2(trajectory)
    semi_axes = k_sigma * np.sqrt(pca.explained_variance)
    angle = float(np.arctan2(pca.components[0, 1], pca.components[0, 0]))
    return Ellipse(center=pca.mean, semi_axes=semi_axes, angle=angle)


def cluster_occupancy(frames: EmotionFrames, clusters: ClusterDefs,
                      emap: Optional[EmotionMap] = None) -> dict[str, float]:
    """Mean-over-frames probability mass per cluster.

    When the engagement clusters are present with the canonical composite
    relation, the combined cluster is reported as the exact sum of its two
    halves so the additive identity holds to the last bit.
    """
    if len(frames) == 0:
        raise EmptyInput("no emotion frames")
    emap = emap or canonical_map()
    if frames.names != emap.names:
        raise UnknownEmotionName("frame columns do not match map names")
    occupancy: dict[str, float] = {}
    for name in clusters:
        idx = [emap.index(member) for member in clusters.members(name)]
        occupancy[name] = float(frames.probs[:, idx].sum(axis=1).mean())
    composite = ("Engaged", "Engaged-Positive", "Engaged-Negative")
    if all(name in occupancy for name in composite):
        union = set(clusters.members("Engaged-Positive")) | set(clusters.members("Engaged-Negative"))
        if union == set(clusters.members("Engaged")):
            occupancy["Engaged"] = occupancy["Engaged-Positive"] + occupancy["Engaged-Negative"]
    return occupancy


def _slug(name: str) -> str:
    out = []
    for ch in name.lower():
        out.append(ch if ch.isalnum() else "_")
    slug = "".join(out)
    while "__" in slug:
        slug = slug.replace("__", "_")
    return slug.strip("_")


def video_feature_names(clusters: Optional[ClusterDefs] = None) -> list[str]:
    clusters = clusters or canonical_clusters()
    names = [
        "va_center_x", "va_center_y",
        "va_var_major", "va_var_minor", "va_angle_rad",
        "va_ellipse_major", "va_ellipse_minor",
    ]
    names.extend(f"cluster_{_slug(name)}" for name in clusters)
    return names


def video_feature_vector(frames: EmotionFrames,
                         emap: Optional[EmotionMap] = None,
                         clusters: Optional[ClusterDefs] = None,
                         k_sigma: float = 2.0) -> dict[str, Optional[float]]:
    """Session-level emotion-space features for the classifier's video modes.

    Geometric features are absent (None) when the trajectory is degenerate.
    """
    emap = emap or canonical_map()
    clusters = clusters or canonical_clusters()
    features: dict[str, Optional[float]] = dict.fromkeys(video_feature_names(clusters))
    trajectory = session_trajectory(frames, emap)
    com = center_of_mass(trajectory)
    features["va_center_x"] = float(com[0])
    features["va_center_y"] = float(com[1])
    try:
        ellipse = confidence_ellipse(trajectory, k_sigma)
        pca = pca2(trajectory)
    except DegenerateInput:
        pass
    else:
        features["va_var_major"] = float(pca.explained_variance[0])
        features["va_var_minor"] = float(pca.explained_variance[1])
        features["va_angle_rad"] = ellipse.angle
        features["va_ellipse_major"] = float(ellipse.semi_axes[0])
        features["va_ellipse_minor"] = float(ellipse.semi_axes[1])
    for name, mass in cluster_occupancy(frames, clusters, emap).items():
        features[f"cluster_{_slug(name)}"] = mass
    return features


def export_trajectory(trajectory: Trajectory, csv_path: str | Path,
                      sidecar_path: str | Path | None = None,
                      k_sigma: float = 2.0) -> None:
    """Write plot-ready trajectory CSV plus a JSON sidecar with the geometry."""
    csv_path = Path(csv_path)
    with open(csv_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t_norm", "x", "y"])
        for t, (x, y) in zip(trajectory.t_norm, trajectory.points):
            writer.writerow([repr(float(t)), repr(float(x)), repr(float(y))])
    if sidecar_path is None:
        return
    com = center_of_mass(trajectory)
    sidecar: dict = {"center": [float(com[0]), float(com[1])], "k_sigma": k_sigma}
    try:
        pca = pca2(trajectory)
        ellipse = confidence_ellipse(trajectory, k_sigma)
    except DegenerateInput:
        sidecar["degenerate"] = True
    else:
        sidecar.update(
            semi_axes=[float(v) for v in ellipse.semi_axes],
            angle_rad=ellipse.angle,
            components=[[float(v) for v in row] for row in pca.components],
            explained_variance=[float(v) for v in pca.explained_variance],
        )
    Path(sidecar_path).write_text(json.dumps(sidecar, indent=2, sort_keys=True) + "\n",
                                  encoding="utf-8")
