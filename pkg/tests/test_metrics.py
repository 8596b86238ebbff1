import numpy as np
import pytest

from cyclonids.errors import DataError
from cyclonids.metrics import (ClassMetrics, accuracy, class_metrics, confusion_matrix,
                               evaluate, f1, macro_aggregate)
from oracles import pair_count_metrics


def test_perfect_predictions_are_diagonal():
    cm = confusion_matrix([0, 1, 2, 1], [0, 1, 2, 1], 3)
    assert np.array_equal(cm.counts, np.diag([1, 2, 1]))
    assert accuracy(cm) == 1.0


def test_direct_tabulation_example():
    cm = confusion_matrix([0, 0, 1], [0, 1, 1], 2)
    assert cm.counts.tolist() == [[1, 1], [0, 1]]


def test_class_metrics_hand_enumerated():
    cm = confusion_matrix([0, 0, 1, 1, 1, 1], [0, 0, 0, 1, 1, 1], 2)
    assert cm.counts.tolist() == [[2, 0], [1, 3]]
    m = class_metrics(cm, 0)
    assert (m.tp, m.fp, m.fn, m.tn) == (2, 1, 0, 3)
    assert m.precision == pytest.approx(2 / 3)
    assert m.recall == 1.0
    assert accuracy(cm) == pytest.approx(5 / 6)


def test_f1_values():
    assert f1(1.0, 1.0) == (1.0, False)
    value, undefined = f1(2 / 3, 1.0)
    assert value == pytest.approx(0.8)
    assert not undefined
    assert f1(0.0, 0.0) == (0.0, True)


def test_zero_denominator_flags():
    # class 2 never appears in actual or predicted
    cm = confusion_matrix([0, 1], [0, 1], 3)
    m = class_metrics(cm, 2)
    assert m.precision == 0.0 and m.precision_undefined
    assert m.recall == 0.0 and m.recall_undefined
    assert m.f1 == 0.0 and m.f1_undefined


def test_macro_aggregate_cases():
    perfect = evaluate([0, 1], [0, 1], ["a", "b"])
    assert (perfect.macro_precision, perfect.macro_recall, perfect.macro_f1) == (1.0, 1.0, 1.0)

    two = [ClassMetrics(1, 0, 0, 1, 1.0, 1.0, 1.0),
           ClassMetrics(1, 1, 1, 1, 0.6, 0.6, 0.6)]
    assert macro_aggregate(two)[2] == pytest.approx(0.8)

    single = [ClassMetrics(3, 1, 2, 4, 0.75, 0.6, 2 * 0.75 * 0.6 / 1.35)]
    assert macro_aggregate(single) == (0.75, 0.6, pytest.approx(2 * 0.75 * 0.6 / 1.35))


def test_uniform_random_accuracy_near_chance():
    rng = np.random.default_rng(42)
    k = 4
    actual = rng.integers(0, k, 20_000)
    predicted = rng.integers(0, k, 20_000)
    cm = confusion_matrix(actual, predicted, k)
    assert abs(accuracy(cm) - 1 / k) < 0.05


def test_oracle_spot_check_100_pairs():
    rng = np.random.default_rng(7)
    for _ in range(100):
        n = int(rng.integers(1, 51))
        k = int(rng.integers(2, 5))
        actual = rng.integers(0, k, n)
        predicted = rng.integers(0, k, n)
        report = evaluate(actual, predicted, [str(i) for i in range(k)])
        expected = pair_count_metrics(actual, predicted, k)
        assert report.accuracy == expected["accuracy"]
        for m, e in zip(report.per_class, expected["per_class"]):
            assert (m.tp, m.fp, m.fn, m.tn) == (e["tp"], e["fp"], e["fn"], e["tn"])
            assert abs(m.precision - e["precision"]) < 1e-12
            assert abs(m.recall - e["recall"]) < 1e-12
            assert abs(m.f1 - e["f1"]) < 1e-12


def test_permutation_invariance():
    rng = np.random.default_rng(3)
    k = 3
    actual = rng.integers(0, k, 200)
    predicted = rng.integers(0, k, 200)
    base = evaluate(actual, predicted, ["a", "b", "c"])
    perm = np.array([2, 0, 1])
    shuffled = evaluate(perm[actual], perm[predicted], ["a", "b", "c"])
    assert shuffled.accuracy == base.accuracy
    for c in range(k):
        m0 = base.per_class[c]
        m1 = shuffled.per_class[perm[c]]
        assert (m0.tp, m0.fp, m0.fn, m0.tn) == (m1.tp, m1.fp, m1.fn, m1.tn)


def test_binary_consistency_with_ratio_formula():
    rng = np.random.default_rng(5)
    actual = rng.integers(0, 2, 300)
    predicted = rng.integers(0, 2, 300)
    cm = confusion_matrix(actual, predicted, 2)
    m = class_metrics(cm, 0)
    assert accuracy(cm) == (m.tn + m.tp) / (m.tn + m.tp + m.fp + m.fn)


def test_bounds():
    rng = np.random.default_rng(11)
    for _ in range(20):
        n = int(rng.integers(1, 40))
        k = int(rng.integers(2, 5))
        report = evaluate(rng.integers(0, k, n), rng.integers(0, k, n),
                          [str(i) for i in range(k)])
        values = [report.accuracy, report.macro_precision, report.macro_recall, report.macro_f1]
        values += [v for m in report.per_class for v in (m.precision, m.recall, m.f1)]
        assert all(0.0 <= v <= 1.0 for v in values)


def test_errors():
    with pytest.raises(DataError):
        confusion_matrix([0, 1], [0], 2)
    with pytest.raises(DataError):
        confusion_matrix([0, 5], [0, 1], 2)
    with pytest.raises(DataError):
        confusion_matrix([], [], 2)
    cm = confusion_matrix([0], [0], 2)
    with pytest.raises(DataError):
        class_metrics(cm, 2)
