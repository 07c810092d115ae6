"""Statistical summaries over a cohort of scored sessions: score correlations,
the success-transition chi-square, multiplicity adjustment, group-by-scenario
descriptives, and self-awareness breakdowns."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy import stats as sps

from .errors import (
    ConstantInput,
    LengthMismatch,
    NoCompleteParticipants,
    OutOfRange,
    ZeroMargin,
)
from .metrics import EstimatorClass, SuccessLabel

SCENARIOS = (1, 2, 3, 4)


@dataclass(frozen=True)
class CorrelationResult:
    r: float
    n: int
    p_two_sided: float


def pearson(x: Sequence[float], y: Sequence[float]) -> CorrelationResult:
    """Sample Pearson correlation with a two-sided t-test p-value (n-2 df).

    A perfect |r| = 1 bypasses the t formula (which would divide by zero) and
    reports p = 0.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if len(x) != len(y):
        raise LengthMismatch(f"{len(x)} vs {len(y)} samples")
    n = len(x)
    if n < 3:
        raise LengthMismatch(f"need at least 3 pairs, got {n}")
    dx = x - x.mean()
    dy = y - y.mean()
    sx = float(np.sqrt(np.sum(dx * dx)))
    sy = float(np.sqrt(np.sum(dy * dy)))
    if sx == 0 or sy == 0:
        raise ConstantInput("correlation is undefined for a constant input")
    r = float(np.sum(dx * dy) / (sx * sy))
    r = max(-1.0, min(1.0, r))
    if abs(r) == 1.0:
        return CorrelationResult(r=r, n=n, p_two_sided=0.0)
    t = r * np.sqrt((n - 2) / (1.0 - r * r))
    p = 2.0 * float(sps.t.sf(abs(t), n - 2))
    return CorrelationResult(r=r, n=n, p_two_sided=min(p, 1.0))


@dataclass(frozen=True)
class ContingencyTable2x2:
    """Rows: initial-scenario status; columns: final-scenario status."""

    a: int  # successful -> successful
    b: int  # successful -> unsuccessful
    c: int  # unsuccessful -> successful
    d: int  # unsuccessful -> unsuccessful

    @property
    def n(self) -> int:
        return self.a + self.b + self.c + self.d

    def cells(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]], dtype=np.float64)


def chi_square_2x2(table: ContingencyTable2x2) -> dict[str, float]:
    """Pearson chi-square with 1 df, no continuity correction."""
    cells = table.cells()
    if np.any(cells < 0) or table.n == 0:
        raise ZeroMargin("table cells must be non-negative with a positive total")
    rows = cells.sum(axis=1)
    cols = cells.sum(axis=0)
    if np.any(rows == 0) or np.any(cols == 0):
        raise ZeroMargin("every row and column margin must be positive")
    expected = np.outer(rows, cols) / table.n
    chi2 = float(np.sum((cells - expected) ** 2 / expected))
    return {"chi2": chi2, "p": float(sps.chi2.sf(chi2, df=1)), "n": table.n}


def stepdown_adjust(pvals: Sequence[float]) -> list[float]:
    """Holm step-down adjustment, returned in the input order."""
    p = list(pvals)
    for value in p:
        if not 0.0 <= value <= 1.0:
            raise OutOfRange(f"p-value {value} outside [0, 1]")
    m = len(p)
    if m == 0:
        return []
    order = sorted(range(m), key=lambda i: p[i])
    adjusted = [0.0] * m
    running = 0.0
    for rank, i in enumerate(order):
        running = max(running, min(1.0, (m - rank) * p[i]))
        adjusted[i] = running
    return adjusted


@dataclass(frozen=True)
class GroupCell:
    group: str        # initial-scenario success label
    scenario: int
    mean: float
    se: Optional[float]  # None for n = 1
    n: int


@dataclass
class SessionRecord:
    """The per-session facts the reporting layer consumes."""

    session_id: str
    participant_id: str
    scenario_id: int
    impact_value: float
    survey_i: float
    survey_p: float
    success: SuccessLabel
    self_estimate: Optional[float] = None
    estimator_class: Optional[EstimatorClass] = None
    dwell: Optional[dict[str, float]] = None  # {"pos": s, "neu": s, "neg": s}


def _complete_participants(records: Sequence[SessionRecord]) -> dict[str, dict[int, SessionRecord]]:
    by_participant: dict[str, dict[int, SessionRecord]] = {}
    for record in records:
        by_participant.setdefault(record.participant_id, {})[record.scenario_id] = record
    return {
        pid: scenarios for pid, scenarios in by_participant.items()
        if all(s in scenarios for s in SCENARIOS)
    }


def group_summary(records: Sequence[SessionRecord]) -> list[GroupCell]:
    """Mean and standard error of the rating score per (initial-status group,
    scenario), over participants with all four scenarios present."""
    complete = _complete_participants(records)
    if not complete:
        raise NoCompleteParticipants("no participant has all four scenarios")
    cells: list[GroupCell] = []
    for group in (SuccessLabel.SUCCESSFUL, SuccessLabel.UNSUCCESSFUL):
        members = [s for s in complete.values() if s[1].success is group]
        for scenario in SCENARIOS:
            values = np.array([m[scenario].impact_value for m in members])
            if len(values) == 0:
                continue
            se = float(np.std(values, ddof=1) / np.sqrt(len(values))) if len(values) > 1 else None
            cells.append(GroupCell(group=group.value, scenario=scenario,
                                   mean=float(values.mean()), se=se, n=len(values)))
    return cells


def success_transition_table(records: Sequence[SessionRecord]) -> ContingencyTable2x2:
    """Cross-tabulate initial-scenario status against final-scenario status."""
    complete = _complete_participants(records)
    if not complete:
        raise NoCompleteParticipants("no participant has all four scenarios")
    a = b = c = d = 0
    for scenarios in complete.values():
        first_ok = scenarios[1].success is SuccessLabel.SUCCESSFUL
        last_ok = scenarios[4].success is SuccessLabel.SUCCESSFUL
        if first_ok and last_ok:
            a += 1
        elif first_ok:
            b += 1
        elif last_ok:
            c += 1
        else:
            d += 1
    return ContingencyTable2x2(a=a, b=b, c=c, d=d)


def estimator_breakdown(records: Sequence[SessionRecord]) -> dict[str, dict[str, float]]:
    """Success proportion per self-awareness category; excluded sessions and
    sessions without a self-estimate do not contribute."""
    out: dict[str, dict[str, float]] = {}
    tallies: dict[str, list[bool]] = {}
    for record in records:
        category = record.estimator_class
        if category is None or category is EstimatorClass.EXCLUDED:
            continue
        tallies.setdefault(category.value, []).append(
            record.success is SuccessLabel.SUCCESSFUL)
    for category, flags in sorted(tallies.items()):
        out[category] = {
            "n": len(flags),
            "success_rate": sum(flags) / len(flags),
        }
    return out
