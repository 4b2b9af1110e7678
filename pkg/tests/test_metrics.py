import math
import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from htk.errors import (
    DataError,
    EmptySampleSet,
    LengthMismatch,
    NegativeLoss,
    NoTerminator,
    NonMonotone,
    NonPositiveEpochCount,
    UnknownLabel,
)
from htk.metrics import (
    DepthSequence,
    Full,
    LinearDecay,
    aggregated_accuracy,
    classification_metrics,
    iou_1d,
    mse,
    normalize_depths,
    teacher_forcing_rate,
    topk_metrics,
    total_loss,
)

from oracles import naive_classification, naive_topk, random_depths, raster_iou


@pytest.mark.parametrize(
    "raw,expected",
    [([0.3, 0.7, 0.995], (0.3, 0.7, 1.0)), ([0.5, 1.0], (0.5, 1.0)), ([0.5, 0.99, 0.3], (0.5, 1.0)), ([1.01], (1.0,))],
)
def test_normalize_depths(raw, expected):
    assert normalize_depths(raw).markers == expected


@pytest.mark.parametrize(
    "raw,exc",
    [([0.3, 0.98], NoTerminator), ([0.5, 0.4, 1.0], NonMonotone), ([0.0, 1.0], DataError), ([1.2], DataError), ([], DataError)],
)
def test_normalize_depths_errors(raw, exc):
    with pytest.raises(exc):
        normalize_depths(raw)


def test_depth_sequence_invariants():
    with pytest.raises(NoTerminator):
        DepthSequence((0.5, 0.9))
    with pytest.raises(NonMonotone):
        DepthSequence((0.5, 0.5, 1.0))
    assert DepthSequence((0.25, 1.0)).stripes == [(0.0, 0.25), (0.25, 1.0)]


def test_iou_examples():
    assert iou_1d([0.4, 1.0], [0.5, 1.0]) == pytest.approx((0.4 / 0.5 + 0.5 / 0.6) / 2, abs=1e-12)
    assert iou_1d([0.4, 1.0], [0.5, 1.0]) == pytest.approx(0.81667, abs=1e-5)
    assert iou_1d([0.2, 0.5, 1.0], [0.5, 1.0]) == pytest.approx(0.4 / 3, abs=1e-12)
    assert iou_1d([0.3, 0.6, 1.0], [0.3, 0.6, 1.0]) == 1.0
    assert iou_1d(DepthSequence((0.5, 1.0)), [0.5, 1.0]) == 1.0


def test_iou_against_raster_and_symmetry():
    rng = np.random.default_rng(21)
    for _ in range(150):
        a, b = random_depths(rng), random_depths(rng)
        v = iou_1d(a, b)
        assert 0.0 <= v <= 1.0
        assert v == pytest.approx(iou_1d(b, a), abs=1e-15)
        assert abs(v - raster_iou(a, b)) <= 1e-3
        assert (v == 1.0) == (a == b)


def test_mse():
    assert mse([1, 2], [1, 2]) == 0
    assert mse([3], [5]) == 4
    rng = random.Random(2)
    p = [rng.uniform(0, 100) for _ in range(50)]
    t = [rng.uniform(0, 100) for _ in range(50)]
    loop = 0.0
    for a, b in zip(p, t):
        loop += (a - b) ** 2
    assert mse(p, t) == pytest.approx(loop / 50, rel=1e-12)
    with pytest.raises(LengthMismatch):
        mse([1], [1, 2])
    with pytest.raises(EmptySampleSet):
        mse([], [])


def test_classification_small_cases():
    s = classification_metrics([("A", "A"), ("B", "B")])
    assert (s.accuracy, s.f1, s.precision, s.recall) == (1.0, 1.0, 1.0, 1.0)
    s = classification_metrics([("A", "A"), ("B", "A")])
    assert s.accuracy == 0.5
    with pytest.raises(EmptySampleSet):
        classification_metrics([])


def test_classification_against_oracles():
    rng = random.Random(9)
    classes = list("ABCDEFG")
    for _ in range(20):
        samples = [(rng.choice(classes[:5]), rng.choice(classes)) for _ in range(100)]
        got = classification_metrics(samples)
        want = naive_classification(samples)
        for g, w in zip((got.accuracy, got.f1, got.precision, got.recall), want):
            assert abs(g - w) <= 1e-12


def test_classification_matches_sklearn():
    skm = pytest.importorskip("sklearn.metrics")
    rng = random.Random(4)
    t = [rng.choice("ABCD") for _ in range(200)]
    p = [rng.choice("ABCDE") for _ in range(200)]
    s = classification_metrics(list(zip(t, p)))
    assert s.accuracy == pytest.approx(skm.accuracy_score(t, p), abs=1e-12)
    kw = dict(average="macro", zero_division=0)
    assert s.precision == pytest.approx(skm.precision_score(t, p, **kw), abs=1e-12)
    assert s.recall == pytest.approx(skm.recall_score(t, p, **kw), abs=1e-12)
    assert s.f1 == pytest.approx(skm.f1_score(t, p, **kw), abs=1e-12)


def test_topk_toy_set():
    samples = [("A", ["A", "B"]), ("B", ["A", "B"]), ("B", ["B", "A"])]
    s = topk_metrics(samples, 1)
    assert s.accuracy == pytest.approx(2 / 3)
    assert s.per_class_recall == {"A": 1.0, "B": 0.5}
    assert s.per_class_precision == {"A": 0.5, "B": 1.0}
    full = topk_metrics(samples, 2)
    assert full.accuracy == 1.0
    assert set(full.per_class_recall.values()) == {1.0}


def test_topk_against_oracle_and_monotone():
    rng = random.Random(13)
    labels = [f"L{i}" for i in range(12)]
    for _ in range(20):
        samples = []
        for _ in range(80):
            r = labels[:]
            rng.shuffle(r)
            samples.append((rng.choice(labels[:8]), r))
        prev = 0.0
        for k in range(1, len(labels) + 1):
            got = topk_metrics(samples, k)
            want = naive_topk(samples, k)
            assert abs(got.accuracy - want[0]) <= 1e-12
            assert abs(got.precision - want[1]) <= 1e-12
            assert abs(got.recall - want[2]) <= 1e-12
            assert got.accuracy >= prev
            prev = got.accuracy
        assert prev == 1.0


def test_topk_errors():
    with pytest.raises(EmptySampleSet):
        topk_metrics([], 1)
    with pytest.raises(DataError):
        topk_metrics([("A", ["A"])], 2)
    with pytest.raises(UnknownLabel):
        topk_metrics([("A", ["Z"])], 1, labels=["A", "B"])


def test_aggregated_accuracy(default_taxonomy):
    assert aggregated_accuracy([("Ah-Bv", "Bt")]) == 1.0
    assert aggregated_accuracy([("Ah", "Bv")]) == 0.0
    samples = [("Ah-Bv", "Bv"), ("Sd", "Sw"), ("Cv", "Ah")]
    assert aggregated_accuracy(samples, default_taxonomy) == pytest.approx(2 / 3)
    with pytest.raises(UnknownLabel):
        aggregated_accuracy([("ah", "Ah")])


@settings(max_examples=100, deadline=None)
@given(st.lists(st.tuples(st.sampled_from(["Ah", "Al", "Bv", "Bt", "Ah-Bv", "Cv"]),
                          st.sampled_from(["Ah", "Al", "Bv", "Bt", "Ah-Bv", "Cv"])), min_size=1))
def test_aggregated_at_least_exact(samples):
    assert aggregated_accuracy(samples) >= classification_metrics(samples).accuracy


def test_total_loss():
    assert total_loss(1, 1, [1] * 5, 1) == 25.1
    assert total_loss(0, 0, [0] * 5, 0) == 0
    assert total_loss(0.2, 2.0, [0.1] * 5, 0.5) == pytest.approx(7.7, abs=1e-12)
    with pytest.raises(NegativeLoss):
        total_loss(-1, 0, [0] * 5, 0)
    with pytest.raises(LengthMismatch):
        total_loss(0, 0, [0] * 4, 0)
    with pytest.raises(DataError):
        total_loss(math.nan, 0, [0] * 5, 0)


def test_total_loss_is_linear():
    base = total_loss(0.3, 1.2, [0.2, 0.1, 0.4, 0.0, 0.3], 0.7)
    assert total_loss(1.3, 1.2, [0.2, 0.1, 0.4, 0.0, 0.3], 0.7) - base == pytest.approx(10)
    assert total_loss(0.3, 2.2, [0.2, 0.1, 0.4, 0.0, 0.3], 0.7) - base == pytest.approx(0.1)
    assert total_loss(0.3, 1.2, [1.2, 0.1, 0.4, 0.0, 0.3], 0.7) - base == pytest.approx(1)
    assert total_loss(0.3, 1.2, [0.2, 0.1, 0.4, 0.0, 0.3], 1.7) - base == pytest.approx(10)


def test_teacher_forcing():
    assert teacher_forcing_rate(Full(), 0) == 1.0
    assert teacher_forcing_rate(Full(), 1000) == 1.0
    assert teacher_forcing_rate(LinearDecay(5), 2) == pytest.approx(0.6)
    assert teacher_forcing_rate(LinearDecay(5), 5) == 0.0
    assert teacher_forcing_rate(LinearDecay(5), 9) == 0.0
    with pytest.raises(NonPositiveEpochCount):
        teacher_forcing_rate(LinearDecay(0), 1)
    with pytest.raises(DataError):
        teacher_forcing_rate(Full(), -1)
