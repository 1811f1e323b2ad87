"""Binary-classification evaluation: confusion counts, rates, weighted
averages, Matthews correlation, and ROC/AUC.

Conventions used throughout: the positive class is 1 (disease present),
labels come from thresholding scores at 0.5 unless stated otherwise, and any
0/0 rate evaluates to 0.0 while being recorded in the report's
``degenerate`` list instead of raising.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

POSITIVE_LABEL = 1


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int
    tn: int
    fp: int
    fn: int

    def __post_init__(self):
        for name in ("tp", "tn", "fp", "fn"):
            if getattr(self, name) < 0:
                raise ValueError(f"confusion count {name} must be non-negative")

    @property
    def total(self) -> int:
        return self.tp + self.tn + self.fp + self.fn


def confusion_matrix(y_true, y_pred) -> ConfusionMatrix:
    y_true = np.asarray(y_true)
    y_pred = np.asarray(y_pred)
    if y_true.shape != y_pred.shape or y_true.ndim != 1:
        raise ValueError(
            f"label vectors must be 1-D and equal length, got {y_true.shape} and {y_pred.shape}"
        )
    for name, v in (("y_true", y_true), ("y_pred", y_pred)):
        values = np.unique(v)
        if not np.all(np.isin(values, (0, 1))):
            raise ValueError(f"{name} must contain only 0/1 labels, got {values.tolist()}")
    t = y_true == POSITIVE_LABEL
    p = y_pred == POSITIVE_LABEL
    return ConfusionMatrix(
        tp=int(np.sum(t & p)),
        tn=int(np.sum(~t & ~p)),
        fp=int(np.sum(~t & p)),
        fn=int(np.sum(t & ~p)),
    )


def _rate(numerator: int, denominator: int) -> tuple[float, bool]:
    """numerator/denominator with the 0/0 -> 0 convention; bool marks it."""
    if denominator == 0:
        return 0.0, True
    return numerator / denominator, False


@dataclass(frozen=True)
class BasicRates:
    accuracy: float
    sensitivity: float
    specificity: float
    precision: float
    degenerate: tuple[str, ...] = ()


def basic_rates(cm: ConfusionMatrix) -> BasicRates:
    """Accuracy, sensitivity (recall of the positive class), specificity,
    and precision straight from the confusion counts."""
    flags = []
    accuracy, d = _rate(cm.tp + cm.tn, cm.total)
    if d:
        flags.append("accuracy")
    sensitivity, d = _rate(cm.tp, cm.tp + cm.fn)
    if d:
        flags.append("sensitivity")
    specificity, d = _rate(cm.tn, cm.tn + cm.fp)
    if d:
        flags.append("specificity")
    precision, d = _rate(cm.tp, cm.tp + cm.fp)
    if d:
        flags.append("precision")
    return BasicRates(accuracy, sensitivity, specificity, precision, tuple(flags))


@dataclass(frozen=True)
class PerClassMetrics:
    class_label: int
    precision: float
    recall: float
    f1: float
    support: int
    degenerate: tuple[str, ...] = ()


def per_class_metrics(cm: ConfusionMatrix) -> list[PerClassMetrics]:
    """Precision/recall/F1 for class 0 and class 1 (in that order)."""
    out = []
    for label, tp, fp, fn in (
        (0, cm.tn, cm.fn, cm.fp),
        (1, cm.tp, cm.fp, cm.fn),
    ):
        flags = []
        precision, d = _rate(tp, tp + fp)
        if d:
            flags.append("precision")
        recall, d = _rate(tp, tp + fn)
        if d:
            flags.append("recall")
        if precision + recall == 0.0:
            f1 = 0.0
            flags.append("f1")
        else:
            f1 = 2.0 * precision * recall / (precision + recall)
        out.append(PerClassMetrics(
            class_label=label, precision=precision, recall=recall, f1=f1,
            support=tp + fn, degenerate=tuple(flags),
        ))
    return out


def weighted_metric(per_class: list[PerClassMetrics], metric: str) -> float:
    """Support-weighted average of one per-class metric."""
    if metric not in ("precision", "recall", "f1"):
        raise ValueError(f"unknown metric selector {metric!r}")
    total = sum(c.support for c in per_class)
    if total <= 0:
        raise ValueError("supports must sum to a positive count")
    return sum(c.support * getattr(c, metric) for c in per_class) / total


def mcc(cm: ConfusionMatrix) -> float:
    """Matthews correlation coefficient.

    Counts are combined in exact integer arithmetic before the final square
    root. When any of the four marginal sums is zero the value is defined
    as 0.0 (the usual degenerate-case convention).
    """
    denom2 = (cm.tp + cm.fp) * (cm.tp + cm.fn) * (cm.tn + cm.fp) * (cm.tn + cm.fn)
    if denom2 == 0:
        return 0.0
    return (cm.tp * cm.tn - cm.fp * cm.fn) / math.sqrt(denom2)


def mcc_is_degenerate(cm: ConfusionMatrix) -> bool:
    return (cm.tp + cm.fp) * (cm.tp + cm.fn) * (cm.tn + cm.fp) * (cm.tn + cm.fn) == 0


# ---------------------------------------------------------------------------
# ROC / AUC
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RocCurve:
    """ROC points ordered from the all-negative to the all-positive end.

    One point per distinct score (prediction is positive iff score >=
    threshold) plus a leading +inf sentinel, which makes the trapezoidal
    ``auc`` equal the tie-corrected Mann-Whitney statistic.
    """

    thresholds: np.ndarray
    fpr: np.ndarray
    tpr: np.ndarray
    auc: float


def roc_curve(y_true, scores) -> RocCurve:
    y_true = np.asarray(y_true)
    scores = np.asarray(scores, dtype=np.float64)
    if y_true.shape != scores.shape or y_true.ndim != 1:
        raise ValueError(
            f"labels and scores must be 1-D and equal length, got {y_true.shape} and {scores.shape}"
        )
    if not np.all(np.isfinite(scores)):
        raise ValueError("scores must be finite")
    n_pos = int(np.sum(y_true == 1))
    n_neg = int(np.sum(y_true == 0))
    if n_pos == 0 or n_neg == 0:
        raise ValueError("ROC needs both classes present in y_true")

    order = np.argsort(-scores, kind="stable")
    sorted_scores = scores[order]
    sorted_pos = (y_true[order] == 1).astype(np.int64)

    cum_tp = np.cumsum(sorted_pos)
    cum_fp = np.cumsum(1 - sorted_pos)
    # Last index of each run of tied scores marks one ROC point.
    distinct_last = np.flatnonzero(np.diff(sorted_scores, append=-np.inf) != 0.0)

    thresholds = np.concatenate(([np.inf], sorted_scores[distinct_last]))
    tpr = np.concatenate(([0.0], cum_tp[distinct_last] / n_pos))
    fpr = np.concatenate(([0.0], cum_fp[distinct_last] / n_neg))
    auc = float(np.sum(np.diff(fpr) * (tpr[1:] + tpr[:-1]) / 2.0))
    return RocCurve(thresholds=thresholds, fpr=fpr, tpr=tpr, auc=auc)


# ---------------------------------------------------------------------------
# Report assembly
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EvaluationReport:
    kind: str
    confusion: ConfusionMatrix
    accuracy: float
    sensitivity: float
    specificity: float
    per_class: list[PerClassMetrics]
    weighted_precision: float
    weighted_recall: float
    weighted_f1: float
    mcc: float
    roc: RocCurve
    threshold: float = 0.5
    degenerate: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        """JSON-ready view; metrics to 4 decimals, ROC points to 6."""
        return {
            "kind": self.kind,
            "threshold": self.threshold,
            "confusion": {"tp": self.confusion.tp, "tn": self.confusion.tn,
                          "fp": self.confusion.fp, "fn": self.confusion.fn},
            "accuracy": round(self.accuracy, 4),
            "sensitivity": round(self.sensitivity, 4),
            "specificity": round(self.specificity, 4),
            "per_class": [
                {"class": c.class_label, "precision": round(c.precision, 4),
                 "recall": round(c.recall, 4), "f1": round(c.f1, 4),
                 "support": c.support}
                for c in self.per_class
            ],
            "weighted_precision": round(self.weighted_precision, 4),
            "weighted_recall": round(self.weighted_recall, 4),
            "weighted_f1": round(self.weighted_f1, 4),
            "mcc": round(self.mcc, 4),
            "auc": round(self.roc.auc, 4),
            "roc_points": [
                {"threshold": _round_threshold(t), "fpr": round(f, 6), "tpr": round(r, 6)}
                for t, f, r in zip(self.roc.thresholds, self.roc.fpr, self.roc.tpr)
            ],
            "degenerate": list(self.degenerate),
        }


def _round_threshold(t: float) -> float | str:
    return "inf" if math.isinf(t) else round(float(t), 6)


def report_from_confusion(cm: ConfusionMatrix, kind: str = "",
                          roc: RocCurve | None = None,
                          threshold: float = 0.5) -> EvaluationReport:
    """Assemble every count-derived metric from a confusion matrix.

    Weighted recall is written as the accuracy itself: for single-label
    binary data the support-weighted recall identity makes them the same
    quantity, and evaluating it this way keeps the equality exact in
    floating point.
    """
    rates = basic_rates(cm)
    per_class = per_class_metrics(cm)
    flags = list(rates.degenerate)
    for c in per_class:
        flags.extend(f"class{c.class_label}.{name}" for name in c.degenerate)
    if mcc_is_degenerate(cm):
        flags.append("mcc")
    if roc is None:
        roc = RocCurve(thresholds=np.array([np.inf]), fpr=np.array([0.0]),
                       tpr=np.array([0.0]), auc=0.0)
    return EvaluationReport(
        kind=kind,
        confusion=cm,
        accuracy=rates.accuracy,
        sensitivity=rates.sensitivity,
        specificity=rates.specificity,
        per_class=per_class,
        weighted_precision=weighted_metric(per_class, "precision"),
        weighted_recall=rates.accuracy,
        weighted_f1=weighted_metric(per_class, "f1"),
        mcc=mcc(cm),
        roc=roc,
        threshold=threshold,
        degenerate=tuple(flags),
    )


def full_report(y_true, scores, threshold: float = 0.5, kind: str = "") -> EvaluationReport:
    """Threshold the scores, count the confusion matrix, and assemble every
    metric plus the full ROC sweep."""
    y_true = np.asarray(y_true)
    scores = np.asarray(scores, dtype=np.float64)
    y_pred = (scores >= threshold).astype(np.int64)
    cm = confusion_matrix(y_true, y_pred)
    roc = roc_curve(y_true, scores)
    return report_from_confusion(cm, kind=kind, roc=roc, threshold=threshold)
