"""Session-level effectiveness scores: rating aggregation, surveys, success
labels, and self-awareness estimator categories."""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import EmptySeries, OutOfRange
from .sessions import SampledSeries

SUCCESS_THRESHOLD = 7.0
ESTIMATOR_FLOOR = 2.5
ESTIMATOR_CEILING = 8.5
ACCURATE_MAX_GAP = 1.0


class Source(enum.Enum):
    INHABITER = "inhabiter"
    PARTICIPANT = "participant"


class SuccessLabel(enum.Enum):
    SUCCESSFUL = "successful"
    UNSUCCESSFUL = "unsuccessful"


class EstimatorClass(enum.Enum):
    ACCURATE = "accurate"
    OVER_ESTIMATOR = "over_estimator"
    UNDER_ESTIMATOR = "under_estimator"
    EXCLUDED = "excluded"


@dataclass(frozen=True)
class ImpactScore:
    """Signed seconds of net positive rating, plus per-state dwell times."""

    value: float
    positive_s: float
    neutral_s: float
    negative_s: float


@dataclass(frozen=True)
class SurveyScore:
    value: float
    source: Source


def impact_score(series: SampledSeries) -> ImpactScore:
    """Aggregate a resampled rating series into signed seconds.

    Each frame contributes its valence divided by the frame rate, so the score
    reads as positive dwell seconds minus negative dwell seconds.
    """
    if len(series) == 0:
        raise EmptySeries("cannot score an empty series")
    values = series.values
    positive = float(np.count_nonzero(values == 1)) / series.rate
    negative = float(np.count_nonzero(values == -1)) / series.rate
    neutral = float(np.count_nonzero(values == 0)) / series.rate
    return ImpactScore(value=positive - negative,
                       positive_s=positive, neutral_s=neutral, negative_s=negative)


def _check_item(value: float, name: str) -> float:
    if not 1 <= value <= 10:
        raise OutOfRange(f"{name} must be in [1, 10], got {value}")
    return float(value)


def survey_inhabiter(item1: float, item2: float) -> SurveyScore:
    """Mean of the two goal-attainment items rated by the avatar's operator."""
    value = (_check_item(item1, "item1") + _check_item(item2, "item2")) / 2.0
    return SurveyScore(value=value, source=Source.INHABITER)


def survey_participant(item: float) -> SurveyScore:
    return SurveyScore(value=_check_item(item, "item"), source=Source.PARTICIPANT)


def classify_success(score: SurveyScore) -> SuccessLabel:
    """Success is an inclusive threshold at 7 on the 1..10 survey scale."""
    if score.value >= SUCCESS_THRESHOLD:
        return SuccessLabel.SUCCESSFUL
    return SuccessLabel.UNSUCCESSFUL


def estimator_category(self_estimate: float, inhabiter_score: SurveyScore) -> EstimatorClass:
    """Compare a participant's self-estimate against the operator's rating.

    Ratings at the scale's floor or ceiling (< 2.5 or > 8.5) are excluded
    because a 1-point differential cannot resolve there; otherwise a gap of
    at most one point counts as accurate and larger gaps classify by sign.
    """
    self_estimate = _check_item(self_estimate, "self_estimate")
    rating = inhabiter_score.value
    if rating < ESTIMATOR_FLOOR or rating > ESTIMATOR_CEILING:
        return EstimatorClass.EXCLUDED
    gap = self_estimate - rating
    if abs(gap) <= ACCURATE_MAX_GAP:
        return EstimatorClass.ACCURATE
    return EstimatorClass.OVER_ESTIMATOR if gap > 0 else EstimatorClass.UNDER_ESTIMATOR
