"""Linear success classifier: deterministic hinge-loss SVM, leave-one-out
cross-validation, ROC/AUC, and weight-ranked feature selection.

The estimator follows the scikit-learn API (fit/predict/decision_function,
get_params) so it composes with that ecosystem, but the solver is a fixed-order
dual coordinate descent written here: leave-one-out over a few hundred rows
must be bit-reproducible, which rules out randomized or threaded backends.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin

from .errors import EmptyDataset, LengthMismatch, SingleClass
from .metrics import SuccessLabel

SUCCESS = SuccessLabel.SUCCESSFUL.value
UNSUCCESS = SuccessLabel.UNSUCCESSFUL.value

try:
    from numba import njit
except ImportError:  # pragma: no cover - kernel stays valid pure Python
    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]
        def wrap(fn):
            return fn
        return wrap


@njit(cache=True)
def _dual_cd(X, y, C, tol, max_iter):  # pragma: no cover - exercised via fit
    """Cyclic dual coordinate descent for the L1-hinge linear SVM.

    X already carries the bias column; iteration order is fixed so results
    are deterministic. Returns (w, alpha, sweeps_used).
    """
    n, d = X.shape
    alpha = np.zeros(n)
    w = np.zeros(d)
    qii = np.empty(n)
    for i in range(n):
        s = 0.0
        for j in range(d):
            s += X[i, j] * X[i, j]
        qii[i] = s
    sweeps = 0
    for it in range(max_iter):
        sweeps = it + 1
        max_pg = 0.0
        for i in range(n):
            if qii[i] <= 0.0:
                alpha[i] = C
                continue
            g = 0.0
            for j in range(d):
                g += w[j] * X[i, j]
            g = y[i] * g - 1.0
            if alpha[i] == 0.0:
                pg = g if g < 0.0 else 0.0
            elif alpha[i] == C:
                pg = g if g > 0.0 else 0.0
            else:
                pg = g
            if abs(pg) > max_pg:
                max_pg = abs(pg)
            if pg != 0.0:
                old = alpha[i]
                new = old - g / qii[i]
                if new < 0.0:
                    new = 0.0
                elif new > C:
                    new = C
                alpha[i] = new
                delta = (new - old) * y[i]
                if delta != 0.0:
                    for j in range(d):
                        w[j] += delta * X[i, j]
        if max_pg < tol:
            break
    return w, alpha, sweeps


class LinearHingeSVC(BaseEstimator, ClassifierMixin):
    """Linear SVM with built-in per-feature standardization.

    Decision scores are w . standardize(x) + b. The bias rides along as an
    extra unit feature in the dual problem, which keeps the solver a box-
    constrained QP with no equality constraint.
    """

    def __init__(self, C: float = 1.0, tol: float = 1e-8, max_iter: int = 200000):
        self.C = C
        self.tol = tol
        self.max_iter = max_iter

    def fit(self, X, y):
        X = np.ascontiguousarray(X, dtype=np.float64)
        y = np.asarray(y)
        if X.ndim != 2 or X.shape[0] == 0:
            raise EmptyDataset("fit requires a non-empty 2D feature matrix")
        if X.shape[0] != len(y):
            raise LengthMismatch(f"{X.shape[0]} rows but {len(y)} labels")
        if not np.all(np.isfinite(X)):
            raise EmptyDataset("feature matrix contains non-finite values")
        if self.C <= 0:
            raise ValueError(f"C must be positive, got {self.C}")
        classes = np.unique(y)
        if len(classes) < 2:
            raise SingleClass("training data contains a single class")
        if len(classes) > 2:
            raise ValueError("binary classifier got more than two classes")
        # the success label is always the positive class so decision scores
        # read "higher = more likely successful"
        if SUCCESS in classes:
            classes = np.array([c for c in classes if c != SUCCESS] + [SUCCESS])
        self.classes_ = classes
        signed = np.where(y == classes[1], 1.0, -1.0)

        self.scaler_mean_ = X.mean(axis=0)
        std = X.std(axis=0)
        self.scaler_std_ = np.where(std > 1e-12, std, 1.0)
        scaled = (X - self.scaler_mean_) / self.scaler_std_
        augmented = np.ascontiguousarray(
            np.hstack([scaled, np.ones((X.shape[0], 1))]))

        w, alpha, sweeps = _dual_cd(augmented, signed, float(self.C),
                                    float(self.tol), int(self.max_iter))
        self.coef_ = w[:-1]
        self.intercept_ = float(w[-1])
        self.dual_coef_ = alpha
        self.n_iter_ = int(sweeps)
        return self

    def decision_function(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        scaled = (X - self.scaler_mean_) / self.scaler_std_
        return scaled @ self.coef_ + self.intercept_

    def predict(self, X) -> np.ndarray:
        return self.classes_[(self.decision_function(X) >= 0).astype(int)]


# --- dataset plumbing ---

@dataclass
class Dataset:
    """Feature matrix with aligned session ids and success labels.

    Absent features are NaN in memory; `select` drops rows that have any
    absent value among the chosen columns and reports which ids were lost.
    """

    feature_names: list[str]
    session_ids: list[str]
    X: np.ndarray
    y: np.ndarray  # label strings, "successful" / "unsuccessful"

    def __len__(self) -> int:
        return len(self.session_ids)

    def select(self, columns: Sequence[str]) -> tuple["Dataset", list[str]]:
        index = {name: i for i, name in enumerate(self.feature_names)}
        cols = [index[c] for c in columns if c in index]
        names = [self.feature_names[i] for i in cols]
        sub = self.X[:, cols]
        keep = np.all(np.isfinite(sub), axis=1)
        dropped = [sid for sid, ok in zip(self.session_ids, keep) if not ok]
        return Dataset(
            feature_names=names,
            session_ids=[sid for sid, ok in zip(self.session_ids, keep) if ok],
            X=sub[keep],
            y=self.y[keep],
        ), dropped


def load_dataset(features_csv: str | Path, labels_csv: str | Path) -> Dataset:
    """Join a features CSV (session_id + named columns) with a labels CSV."""
    labels: dict[str, str] = {}
    with open(labels_csv, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            labels[row["session_id"]] = row["success"]
    names: list[str] = []
    ids: list[str] = []
    rows: list[list[float]] = []
    y: list[str] = []
    with open(features_csv, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        names = header[1:]
        for record in reader:
            sid = record[0]
            if sid not in labels:
                continue
            ids.append(sid)
            rows.append([float(cell) if cell != "" else np.nan for cell in record[1:]])
            y.append(labels[sid])
    X = np.array(rows, dtype=np.float64) if rows else np.zeros((0, len(names)))
    return Dataset(feature_names=names, session_ids=ids, X=X, y=np.array(y))


# --- cross-validation and ranking quality ---

@dataclass
class CvResult:
    session_ids: list[str]
    true_labels: np.ndarray
    scores: np.ndarray
    predicted: np.ndarray
    skipped: list[str] = field(default_factory=list)

    @property
    def accuracy(self) -> float:
        return float(np.mean(self.predicted == self.true_labels))

    def confusion(self) -> dict[str, int]:
        tp = int(np.sum((self.true_labels == SUCCESS) & (self.predicted == SUCCESS)))
        fn = int(np.sum((self.true_labels == SUCCESS) & (self.predicted != SUCCESS)))
        fp = int(np.sum((self.true_labels != SUCCESS) & (self.predicted == SUCCESS)))
        tn = int(np.sum((self.true_labels != SUCCESS) & (self.predicted != SUCCESS)))
        return {"tp": tp, "fp": fp, "tn": tn, "fn": fn}


def loo_cv(dataset: Dataset, C: float = 1.0) -> CvResult:
    """Leave-one-out cross-validation with standardization refit per fold.

    Each held-out row is scored by a model that never saw it; folds whose
    training split collapses to one class are skipped and reported.
    """
    n = len(dataset)
    if n < 3:
        raise EmptyDataset(f"leave-one-out needs at least 3 rows, got {n}")
    if len(np.unique(dataset.y)) < 2:
        raise SingleClass("dataset contains a single class")
    ids, trues, scores, preds, skipped = [], [], [], [], []
    mask = np.ones(n, dtype=bool)
    for i in range(n):
        mask[i] = False
        train_y = dataset.y[mask]
        if len(np.unique(train_y)) < 2:
            skipped.append(dataset.session_ids[i])
            mask[i] = True
            continue
        model = LinearHingeSVC(C=C).fit(dataset.X[mask], train_y)
        score = float(model.decision_function(dataset.X[i:i + 1])[0])
        ids.append(dataset.session_ids[i])
        trues.append(dataset.y[i])
        scores.append(score)
        preds.append(model.classes_[int(score >= 0)])
        mask[i] = True
    return CvResult(session_ids=ids, true_labels=np.array(trues),
                    scores=np.array(scores), predicted=np.array(preds),
                    skipped=skipped)


@dataclass
class RocCurve:
    points: list[tuple[float, float]]  # (fpr, tpr), from (0,0) to (1,1)
    auc: float


def roc_auc(scores, labels) -> RocCurve:
    """Threshold sweep over unique scores; trapezoidal AUC, ties half-credited."""
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels)
    if len(scores) != len(labels):
        raise LengthMismatch(f"{len(scores)} scores but {len(labels)} labels")
    pos = labels == SUCCESS
    n_pos = int(np.sum(pos))
    n_neg = len(labels) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise SingleClass("ROC needs both classes present")
    order = np.argsort(-scores, kind="stable")
    sorted_scores = scores[order]
    sorted_pos = pos[order]
    points = [(0.0, 0.0)]
    # integer accumulation keeps the trapezoid sum an exact rational, so the
    # result matches concordant/tied pair counting bit for bit
    tp = fp = 0
    auc_twice_num = 0
    i = 0
    while i < len(sorted_scores):
        j = i
        tp_prev, fp_prev = tp, fp
        while j < len(sorted_scores) and sorted_scores[j] == sorted_scores[i]:
            tp += int(sorted_pos[j])
            fp += int(not sorted_pos[j])
            j += 1
        auc_twice_num += (fp - fp_prev) * (tp_prev + tp)
        points.append((fp / n_neg, tp / n_pos))
        i = j
    return RocCurve(points=points, auc=auc_twice_num / (2 * n_pos * n_neg))


# --- feature selection ---

@dataclass
class FeatureSubset:
    selected: list[str]
    provenance: list[tuple[str, int, float]]  # (name, rank, |weight|) for the top-k
    pruned: list[tuple[str, str, float]]      # (name, kept partner, correlation)


def select_features(dataset: Dataset, C: float = 1.0, top_k: int = 20,
                    corr_max: float = 0.9) -> FeatureSubset:
    """Keep the top-k features by |weight| from a full fit, then drop the
    lower-ranked member of any pair whose |correlation| exceeds the cap."""
    model = LinearHingeSVC(C=C).fit(dataset.X, dataset.y)
    magnitude = np.abs(model.coef_)
    order = np.argsort(-magnitude, kind="stable")
    top = order[:top_k]
    provenance = [(dataset.feature_names[i], rank, float(magnitude[i]))
                  for rank, i in enumerate(top)]

    kept: list[int] = []
    pruned: list[tuple[str, str, float]] = []
    for i in top:
        partner = None
        corr_hit = 0.0
        for j in kept:
            xi, xj = dataset.X[:, i], dataset.X[:, j]
            si, sj = xi.std(), xj.std()
            if si <= 1e-12 or sj <= 1e-12:
                continue
            corr = float(np.corrcoef(xi, xj)[0, 1])
            if abs(corr) > corr_max:
                partner, corr_hit = j, corr
                break
        if partner is None:
            kept.append(i)
        else:
            pruned.append((dataset.feature_names[i],
                           dataset.feature_names[partner], corr_hit))
    return FeatureSubset(
        selected=[dataset.feature_names[i] for i in kept],
        provenance=provenance,
        pruned=pruned,
    )


# --- mode comparison ---

@dataclass
class ModeReport:
    mode: str
    n_rows: int
    dropped: list[str]
    accuracy: float
    auc: float
    roc_points: list[tuple[float, float]]
    feature_names: list[str]
    prep_wall_s: Optional[float] = None


def evaluate_modes(dataset: Dataset, audio_columns: list[str], video_columns: list[str],
                   modes: Sequence[str], C: float = 1.0, top_k: int = 20,
                   corr_max: float = 0.9,
                   prep_seconds: Optional[dict[str, dict[str, float]]] = None) -> list[ModeReport]:
    """Run leave-one-out per requested mode and assemble the comparison report.

    `prep_seconds` is optional per-session extraction timing measured upstream
    ({session_id: {"audio_s": .., "video_s": ..}}); when absent the report
    leaves the wall-time column empty so re-runs stay byte-identical.
    """
    present = set(dataset.feature_names)
    audio_cols = [c for c in audio_columns if c in present]
    video_cols = [c for c in video_columns if c in present]
    reports = []
    for mode in modes:
        if mode == "full":
            columns = audio_cols + video_cols
        elif mode == "audio_only":
            columns = audio_cols
        elif mode == "video_only":
            columns = video_cols
        elif mode == "top_selected":
            base, _ = dataset.select(audio_cols + video_cols)
            columns = select_features(base, C=C, top_k=top_k, corr_max=corr_max).selected
        else:
            raise ValueError(f"unknown mode {mode!r}")
        subset, dropped = dataset.select(columns)
        cv = loo_cv(subset, C=C)
        roc = roc_auc(cv.scores, cv.true_labels)
        prep = None
        if prep_seconds is not None:
            keys = {"full": ("audio_s", "video_s"), "audio_only": ("audio_s",),
                    "video_only": ("video_s",), "top_selected": ("audio_s", "video_s")}[mode]
            prep = sum(prep_seconds.get(sid, {}).get(k, 0.0)
                       for sid in subset.session_ids for k in keys)
        reports.append(ModeReport(
            mode=mode, n_rows=len(subset), dropped=dropped,
            accuracy=cv.accuracy, auc=roc.auc, roc_points=roc.points,
            feature_names=columns, prep_wall_s=prep,
        ))
    return reports
