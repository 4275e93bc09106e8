"""Accuracy breakdowns and ROC analysis for binary taggers."""

import math
from collections.abc import Sequence

import numpy as np
from pydantic import BaseModel, Field, model_validator

from core import MetricInputError, MetricReport

DECISION_THRESHOLD = 0.5


class RocCurve(BaseModel):
    points: list[tuple[float, float]] = Field(..., description="(FPR, TPR) pairs from (0,0) to (1,1)")
    auc: float = Field(..., ge=0.0, le=1.0)

    @model_validator(mode="after")
    def validate_points(self):
        if self.points[0] != (0.0, 0.0) or self.points[-1] != (1.0, 1.0):
            raise ValueError("ROC curve must start at (0, 0) and end at (1, 1)")
        for (x0, y0), (x1, y1) in zip(self.points, self.points[1:], strict=False):
            if x1 < x0 or y1 < y0:
                raise ValueError("ROC points must be non-decreasing")
        return self


def _as_arrays(scores: Sequence[float], labels: Sequence[int]) -> tuple[np.ndarray, np.ndarray]:
    scores = np.asarray(scores, dtype=np.float64).reshape(-1)
    labels = np.asarray(labels, dtype=np.int64).reshape(-1)
    if len(scores) == 0:
        raise MetricInputError("classification metrics need at least one event")
    if len(scores) != len(labels):
        raise MetricInputError(f"{len(scores)} scores but {len(labels)} labels")
    if np.any((scores < 0) | (scores > 1)) or not np.all(np.isfinite(scores)):
        raise MetricInputError("scores must lie in [0, 1]")
    if np.any((labels != 0) & (labels != 1)):
        raise MetricInputError("labels must be 0 or 1")
    return scores, labels


def classification_metrics(
    scores: Sequence[float], labels: Sequence[int], ids: Sequence[int] | None = None
) -> MetricReport:
    """Overall, signal and background accuracy at a 0.5 decision threshold.

    A score of exactly 0.5 is called signal. The accuracy of a class absent from
    the input is reported as null.
    """
    scores, labels = _as_arrays(scores, labels)
    ids = list(range(len(scores))) if ids is None else [int(i) for i in ids]
    if len(ids) != len(scores):
        raise MetricInputError(f"{len(ids)} ids but {len(scores)} scores")
    correct = ((scores >= DECISION_THRESHOLD).astype(np.int64) == labels).astype(np.float64)
    signal, background = labels == 1, labels == 0
    n = len(labels)

    def recall(mask: np.ndarray) -> float | None:
        return math.fsum(correct[mask]) / int(mask.sum()) if mask.any() else None

    return MetricReport.build(
        "accuracy",
        dict(zip(ids, correct.tolist(), strict=True)),
        params={"threshold": DECISION_THRESHOLD},
        values={
            "accuracy": math.fsum(correct) / n,
            "signal_accuracy": recall(signal),
            "background_accuracy": recall(background),
            "signal_ratio": int(signal.sum()) / n,
        },
    )


def roc_auc(scores: Sequence[float], labels: Sequence[int]) -> RocCurve:
    """ROC from a sweep over every distinct score; AUC by the trapezoid rule.

    Tied scores enter the curve together, so the area equals the pairwise rank
    statistic with ties counted as one half.
    """
    scores, labels = _as_arrays(scores, labels)
    n_pos = int((labels == 1).sum())
    n_neg = len(labels) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise MetricInputError("ROC analysis needs both signal and background events")
    order = np.argsort(-scores, kind="stable")
    ranked_scores, ranked_labels = scores[order], labels[order]
    tp = np.cumsum(ranked_labels == 1)
    fp = np.cumsum(ranked_labels == 0)
    # last position of each run of tied scores
    group_ends = np.flatnonzero(np.r_[ranked_scores[1:] != ranked_scores[:-1], True])
    tpr = np.r_[0.0, tp[group_ends] / n_pos]
    fpr = np.r_[0.0, fp[group_ends] / n_neg]
    auc = float(np.clip(np.trapezoid(tpr, fpr), 0.0, 1.0))
    return RocCurve(points=list(zip(fpr.tolist(), tpr.tolist(), strict=True)), auc=auc)


def auc_report(scores: Sequence[float], labels: Sequence[int], ids: Sequence[int] | None = None) -> MetricReport:
    """AUC as a report; per-sample values are the signal scores being ranked."""
    curve = roc_auc(scores, labels)
    ids = list(range(len(scores))) if ids is None else [int(i) for i in ids]
    return MetricReport.build(
        "auc",
        dict(zip(ids, (float(s) for s in scores), strict=True)),
        values={"auc": curve.auc},
    )
