import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fbeta_penalty.errors import EmptyBatch, ShapeMismatch
from fbeta_penalty.loss import (
    EPS,
    BatchPrediction,
    PenaltyWeight,
    batch_precision_recall,
    confusion_counts,
    weighted_bce,
    weighted_bce_grad,
    weighted_bce_terms,
)


def plain_bce(f, y):
    f = np.clip(np.asarray(f, dtype=float), EPS, 1 - EPS)
    return float(-np.sum(y * np.log(f) + (1 - y) * np.log(1 - f)))


def one(f, y):
    return BatchPrediction(np.array([f]), np.array([y]))


class TestWeightedBce:
    def test_negative_on_correct_side(self):
        assert weighted_bce(one(0.8, 0), PenaltyWeight(3.0)) == pytest.approx(-math.log(0.2) / 4, abs=1e-6)
        assert weighted_bce(one(0.8, 0), PenaltyWeight(3.0)) == pytest.approx(0.402359478108525, rel=1e-12)

    @pytest.mark.parametrize("b", [0.0, 0.5, 3.0, 100.0])
    def test_positive_unchanged(self, b):
        assert weighted_bce(one(0.8, 1), PenaltyWeight(b)) == pytest.approx(0.2231435513142097, rel=1e-12)

    def test_zero_penalty_is_plain_bce(self):
        rng = np.random.default_rng(0)
        for _ in range(50):
            f, y = rng.random(32), rng.integers(0, 2, 32).astype(float)
            assert weighted_bce(BatchPrediction(f, y), PenaltyWeight(0.0)) == plain_bce(f, y)

    def test_boundary_goes_to_reduced_branch(self):
        got = weighted_bce(one(0.5, 0), PenaltyWeight(3.0))
        assert got == pytest.approx(-math.log(0.5) / 4)

    def test_clamped_logs_finite(self):
        batch = BatchPrediction(np.array([0.0, 1.0, 0.0, 1.0]), np.array([1, 0, 0, 1]))
        assert np.isfinite(weighted_bce(batch, PenaltyWeight(3.0)))

    def test_empty(self):
        with pytest.raises(EmptyBatch):
            BatchPrediction(np.array([]), np.array([]))

    def test_mismatch(self):
        with pytest.raises(ShapeMismatch):
            BatchPrediction(np.array([0.2, 0.3]), np.array([1.0]))

    def test_negative_penalty_rejected(self):
        with pytest.raises(ValueError):
            PenaltyWeight(-0.1)

    @settings(max_examples=200)
    @given(st.lists(st.tuples(st.floats(0, 1), st.integers(0, 1)), min_size=1, max_size=40),
           st.floats(0, 50))
    def test_nonnegative_and_bracketed(self, items, b):
        f = np.array([i[0] for i in items])
        y = np.array([i[1] for i in items], dtype=float)
        batch = BatchPrediction(f, y)
        terms = weighted_bce_terms(batch, PenaltyWeight(b))
        assert np.all(np.isfinite(terms)) and np.all(terms >= 0)
        plain = -np.log1p(-batch.predictions)
        neg = y == 0
        k = 1 + b
        assert np.all(terms[neg] >= plain[neg] / k * (1 - 1e-12))
        assert np.all(terms[neg] <= plain[neg] * k * (1 + 1e-12))


class TestGrad:
    def test_examples(self):
        assert weighted_bce_grad(one(0.5, 1), PenaltyWeight(7.0))[0] == -2.0
        assert weighted_bce_grad(one(0.8, 0), PenaltyWeight(3.0))[0] == pytest.approx(1.25, rel=1e-12)
        assert weighted_bce_grad(one(0.2, 0), PenaltyWeight(3.0))[0] == pytest.approx(5.0, rel=1e-12)

    @pytest.mark.parametrize("b", [0.0, 1.0, 3.0])
    def test_finite_differences(self, b):
        rng = np.random.default_rng(int(b) + 100)
        h = 1e-6
        weight = PenaltyWeight(b)
        for _ in range(500):
            f = rng.uniform(0.01, 0.99, 32)
            y = rng.integers(0, 2, 32).astype(float)
            g = weighted_bce_grad(BatchPrediction(f, y), weight)
            keep = np.abs((1 - f) - 0.5) >= 1e-4
            for i in np.flatnonzero(keep):
                up, dn = f.copy(), f.copy()
                up[i] += h
                dn[i] -= h
                # items in different branches across the step are excluded above
                num = (weighted_bce(BatchPrediction(up, y), weight)
                       - weighted_bce(BatchPrediction(dn, y), weight)) / (2 * h)
                assert abs(num - g[i]) <= 1e-5 * max(1.0, abs(g[i]))


class TestBatchPR:
    def test_example(self):
        batch = BatchPrediction(np.array([0.9, 0.6, 0.2, 0.8]), np.array([1, 0, 1, 1]))
        assert confusion_counts(batch.predictions, batch.labels) == (2, 1, 1, 0)
        pr = batch_precision_recall(batch)
        assert pr.precision == pytest.approx(2 / 3) and pr.recall == pytest.approx(2 / 3)

    def test_all_correct(self):
        pr = batch_precision_recall(BatchPrediction(np.array([0.9, 0.1, 0.7]), np.array([1, 0, 1])))
        assert (pr.precision, pr.recall) == (1.0, 1.0)

    def test_all_negative_labels_undefined(self):
        assert batch_precision_recall(BatchPrediction(np.array([0.9, 0.1]), np.array([0, 0]))) is None

    def test_no_positive_predictions_undefined(self):
        assert batch_precision_recall(BatchPrediction(np.array([0.4, 0.1]), np.array([1, 0]))) is None

    def test_threshold_inclusive(self):
        assert confusion_counts(np.array([0.5]), np.array([1])) == (1, 0, 0, 0)
