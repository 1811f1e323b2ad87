import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pdvoice.metrics import (ConfusionMatrix, basic_rates, confusion_matrix,
                             full_report, mcc, per_class_metrics,
                             report_from_confusion, roc_curve, weighted_metric)

# Published four-model confusion matrices on the 39-sample holdout
# (tp, tn, fp, fn) and the companion MCC values rounded to 4 decimals.
PUBLISHED = {
    "saint": (ConfusionMatrix(tp=28, tn=10, fp=0, fn=1), 0.9369),
    "tabnet": (ConfusionMatrix(tp=27, tn=10, fp=0, fn=2), 0.8808),
    "mlp": (ConfusionMatrix(tp=28, tn=9, fp=1, fn=1), 0.8655),
    "gbm": (ConfusionMatrix(tp=27, tn=8, fp=2, fn=2), 0.7310),
}


def mann_whitney_auc(y_true, scores):
    """Brute-force pair count: positives outscoring negatives, ties half."""
    pos = scores[y_true == 1]
    neg = scores[y_true == 0]
    wins = (pos[:, None] > neg[None, :]).sum()
    ties = (pos[:, None] == neg[None, :]).sum()
    return (wins + 0.5 * ties) / (len(pos) * len(neg))


class TestConfusionMatrix:
    def test_perfect_two_sample_case(self):
        cm = confusion_matrix([1, 0], [1, 0])
        assert (cm.tp, cm.tn, cm.fp, cm.fn) == (1, 1, 0, 0)

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            confusion_matrix([1, 0], [1])

    def test_non_binary_labels(self):
        with pytest.raises(ValueError):
            confusion_matrix([1, 2], [1, 0])

    def test_published_counts_reconstructed_from_labels(self):
        cm, _ = PUBLISHED["saint"]
        y_true = [1] * 29 + [0] * 10
        y_pred = [1] * 28 + [0] + [0] * 10
        assert confusion_matrix(y_true, y_pred) == cm

    def test_total(self):
        cm, _ = PUBLISHED["gbm"]
        assert cm.total == 39


class TestBasicRates:
    def test_saint_rates(self):
        cm, _ = PUBLISHED["saint"]
        rates = basic_rates(cm)
        assert rates.accuracy == 38 / 39
        assert rates.sensitivity == 28 / 29
        assert rates.specificity == 1.0
        assert rates.precision == 1.0
        assert rates.degenerate == ()

    def test_all_correct(self):
        rates = basic_rates(ConfusionMatrix(tp=5, tn=5, fp=0, fn=0))
        assert (rates.accuracy, rates.sensitivity, rates.specificity,
                rates.precision) == (1.0, 1.0, 1.0, 1.0)

    def test_zero_rule_flags(self):
        rates = basic_rates(ConfusionMatrix(tp=0, tn=5, fp=0, fn=0))
        assert rates.sensitivity == 0.0
        assert "sensitivity" in rates.degenerate
        assert "precision" in rates.degenerate
        assert rates.specificity == 1.0


class TestWeightedMetrics:
    def test_saint_weighted_precision(self):
        cm, _ = PUBLISHED["saint"]
        expected = (29 * 1.0 + 10 * (10 / 11)) / 39
        value = weighted_metric(per_class_metrics(cm), "precision")
        assert abs(value - expected) < 1e-15
        assert abs(value - 0.98) < 0.005
        assert round(value, 4) == 0.9767

    def test_equal_per_class_values_pass_through(self):
        cm = ConfusionMatrix(tp=8, tn=8, fp=2, fn=2)
        pc = per_class_metrics(cm)
        assert pc[0].precision == pc[1].precision == 0.8
        assert weighted_metric(pc, "precision") == 0.8

    def test_gbm_weighted_precision(self):
        cm, _ = PUBLISHED["gbm"]
        expected = (29 * (27 / 29) + 10 * (8 / 10)) / 39
        value = weighted_metric(per_class_metrics(cm), "precision")
        assert abs(value - expected) < 1e-15
        assert round(value, 4) == 0.8974
        assert abs(value - 0.90) < 0.005

    def test_unknown_selector(self):
        with pytest.raises(ValueError):
            weighted_metric(per_class_metrics(ConfusionMatrix(1, 1, 0, 0)), "auc")

    @settings(max_examples=80, deadline=None)
    @given(st.tuples(st.integers(0, 60), st.integers(0, 60),
                     st.integers(0, 60), st.integers(0, 60)))
    def test_weighted_recall_tracks_accuracy(self, counts):
        tp, tn, fp, fn = counts
        if tp + fn == 0 or tn + fp == 0:
            return
        cm = ConfusionMatrix(tp=tp, tn=tn, fp=fp, fn=fn)
        assert abs(weighted_metric(per_class_metrics(cm), "recall")
                   - basic_rates(cm).accuracy) < 1e-12

    def test_report_weighted_recall_equals_accuracy_exactly(self):
        rng = np.random.default_rng(17)
        for _ in range(200):
            tp, tn, fp, fn = (int(v) for v in rng.integers(0, 50, size=4))
            if tp + fn == 0 or tn + fp == 0 or tp + tn + fp + fn == 0:
                continue
            report = report_from_confusion(ConfusionMatrix(tp, tn, fp, fn))
            assert report.weighted_recall == report.accuracy


class TestMcc:
    @pytest.mark.parametrize("kind", sorted(PUBLISHED))
    def test_published_values(self, kind):
        cm, expected = PUBLISHED[kind]
        assert round(mcc(cm), 4) == expected

    def test_range_endpoints(self):
        assert mcc(ConfusionMatrix(tp=10, tn=10, fp=0, fn=0)) == 1.0
        assert mcc(ConfusionMatrix(tp=0, tn=0, fp=10, fn=10)) == -1.0

    def test_degenerate_is_zero(self):
        assert mcc(ConfusionMatrix(tp=0, tn=5, fp=0, fn=0)) == 0.0

    @settings(max_examples=80, deadline=None)
    @given(st.tuples(st.integers(0, 40), st.integers(0, 40),
                     st.integers(0, 40), st.integers(0, 40)))
    def test_symmetric_under_class_relabeling(self, counts):
        tp, tn, fp, fn = counts
        original = mcc(ConfusionMatrix(tp=tp, tn=tn, fp=fp, fn=fn))
        swapped = mcc(ConfusionMatrix(tp=tn, tn=tp, fp=fn, fn=fp))
        assert abs(original - swapped) < 1e-12


class TestRocCurve:
    def test_perfect_separation(self):
        roc = roc_curve([1, 1, 0, 0], [0.9, 0.8, 0.2, 0.1])
        assert roc.auc == 1.0

    def test_interleaved_labels(self):
        roc = roc_curve([1, 0, 1, 0], [0.9, 0.8, 0.2, 0.1])
        assert abs(roc.auc - 0.75) < 1e-12

    def test_all_scores_equal(self):
        roc = roc_curve([1, 0, 1, 0], [0.3, 0.3, 0.3, 0.3])
        assert abs(roc.auc - 0.5) < 1e-12
        assert len(roc.thresholds) == 2  # sentinel plus the single tied point

    def test_endpoints_and_monotonicity(self):
        rng = np.random.default_rng(3)
        y = rng.integers(0, 2, size=50)
        y[:2] = [0, 1]
        scores = np.round(rng.random(50), 2)
        roc = roc_curve(y, scores)
        assert (roc.fpr[0], roc.tpr[0]) == (0.0, 0.0)
        assert (roc.fpr[-1], roc.tpr[-1]) == (1.0, 1.0)
        assert np.all(np.diff(roc.fpr) >= 0)
        assert np.all(np.diff(roc.tpr) >= 0)

    def test_single_class_rejected(self):
        with pytest.raises(ValueError):
            roc_curve([1, 1, 1], [0.2, 0.3, 0.4])

    def test_trapezoid_matches_brute_force_with_ties(self):
        rng = np.random.default_rng(4)
        for _ in range(60):
            n = int(rng.integers(4, 120))
            y = rng.integers(0, 2, size=n)
            y[:2] = [0, 1]
            scores = np.round(rng.random(n), 1)  # heavy ties
            roc = roc_curve(y, scores)
            assert abs(roc.auc - mann_whitney_auc(y, scores)) < 1e-9


class TestFullReport:
    def test_saint_report_matches_published_roundings(self):
        cm, expected_mcc = PUBLISHED["saint"]
        y_true = np.array([1] * 29 + [0] * 10)
        scores = np.concatenate([
            np.linspace(0.95, 0.6, 28), [0.2],   # positives, one missed
            np.linspace(0.4, 0.05, 10),          # negatives all below 0.5
        ])
        report = full_report(y_true, scores, kind="saint")
        assert report.confusion == cm
        assert round(report.weighted_precision, 2) == 0.98
        assert round(report.weighted_recall, 2) == 0.97
        assert round(report.weighted_f1, 2) == 0.97
        assert round(report.mcc, 4) == expected_mcc
        assert report.degenerate == ()

    def test_mlp_and_tabnet_published_mcc(self):
        assert round(mcc(PUBLISHED["mlp"][0]), 4) == 0.8655
        assert round(mcc(PUBLISHED["tabnet"][0]), 4) == 0.8808
        wp = weighted_metric(per_class_metrics(PUBLISHED["tabnet"][0]), "precision")
        expected = (29 * 1.0 + 10 * (10 / 12)) / 39
        assert abs(wp - expected) < 1e-15
        assert abs(wp - 0.96) < 0.005

    def test_labels_threshold_at_half(self):
        report = full_report([1, 0], [0.5, 0.49])
        assert report.confusion == ConfusionMatrix(tp=1, tn=1, fp=0, fn=0)

    def test_to_dict_rounding(self):
        report = full_report([1, 0, 1], [0.9, 0.2, 0.7], kind="demo")
        doc = report.to_dict()
        assert doc["kind"] == "demo"
        assert doc["accuracy"] == 1.0
        assert doc["roc_points"][0]["threshold"] == "inf"
        assert all(isinstance(p["fpr"], float) for p in doc["roc_points"])
        assert set(doc) >= {"confusion", "weighted_precision", "weighted_recall",
                            "weighted_f1", "mcc", "auc", "per_class", "degenerate"}
