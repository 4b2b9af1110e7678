"""Evaluation metrics: depth-stripe IoU, regression/classification scores,
top-k ranking scores, main-symbol accuracy and the multitask loss weights."""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

from . import kernels
from .errors import (
    DataError,
    EmptySampleSet,
    LengthMismatch,
    NegativeLoss,
    NoTerminator,
    NonMonotone,
    NonPositiveEpochCount,
    UnknownLabel,
)
from .grammar import main_symbol, parse_label

STOP_VALUE = 1.0
DEFAULT_EPSILON = 0.01
# absorbs representation error in comparisons such as 1.0 - 0.99 <= 0.01
_FLOAT_SLACK = 1e-12


@dataclass(frozen=True)
class DepthSequence:
    """Lower boundaries ``0 < d_1 < ... < d_D = 1.0`` of the horizon stripes."""

    markers: Tuple[float, ...]

    def __post_init__(self):
        ms = tuple(float(x) for x in self.markers)
        object.__setattr__(self, "markers", ms)
        if not ms:
            raise DataError("depth sequence is empty")
        if ms[-1] != STOP_VALUE:
            raise NoTerminator(f"depth sequence must end at {STOP_VALUE}, got {ms[-1]}")
        prev = 0.0
        for x in ms:
            if not x > prev:
                raise NonMonotone(f"depth markers must increase strictly from 0: {list(ms)}")
            prev = x

    def __len__(self) -> int:
        return len(self.markers)

    @property
    def stripes(self) -> List[Tuple[float, float]]:
        lows = (0.0,) + self.markers[:-1]
        return list(zip(lows, self.markers))


def normalize_depths(raw: Sequence[float], epsilon: float = DEFAULT_EPSILON) -> DepthSequence:
    """Round the first marker within ``epsilon`` of the stop value to 1.0 and
    drop everything after it."""
    if not len(raw):
        raise DataError("no depth markers")
    out: List[float] = []
    for x in raw:
        x = float(x)
        if not 0.0 < x <= STOP_VALUE + epsilon + _FLOAT_SLACK:
            raise DataError(f"depth marker {x} outside (0, {STOP_VALUE + epsilon}]")
        if abs(STOP_VALUE - x) <= epsilon + _FLOAT_SLACK:
            if out and out[-1] >= STOP_VALUE:
                raise NonMonotone(f"marker {out[-1]} already reaches the stop value")
            out.append(STOP_VALUE)
            return DepthSequence(tuple(out))
        if out and x <= out[-1]:
            raise NonMonotone(f"depth markers must increase strictly: {list(raw)}")
        out.append(x)
    raise NoTerminator(f"no marker within {epsilon} of {STOP_VALUE}: {list(raw)}")


def _markers(seq) -> Sequence[float]:
    return seq.markers if isinstance(seq, DepthSequence) else seq


def iou_1d(pred, truth) -> float:
    """Mean IoU of index-paired stripes over ``max(len(pred), len(truth))``
    stripes; unpaired stripes score 0."""
    return float(kernels.iou_1d(_markers(pred), _markers(truth)))


def mse(pred: Sequence[float], truth: Sequence[float]) -> float:
    if len(pred) != len(truth):
        raise LengthMismatch(f"{len(pred)} predictions vs {len(truth)} targets")
    if not len(pred):
        raise EmptySampleSet("mse of an empty list")
    return math.fsum((float(p) - float(t)) ** 2 for p, t in zip(pred, truth)) / len(pred)


@dataclass(frozen=True)
class ClassificationScores:
    accuracy: float
    f1: float
    precision: float
    recall: float


def classification_metrics(samples: Iterable[Tuple[object, object]]) -> ClassificationScores:
    """Accuracy and macro F1/precision/recall over the classes seen in either
    truth or predictions.  A 0/0 ratio counts as 0."""
    samples = list(samples)
    if not samples:
        raise EmptySampleSet("no samples")
    tp: Counter = Counter()
    support: Counter = Counter()
    predicted: Counter = Counter()
    for t, p in samples:
        support[t] += 1
        predicted[p] += 1
        if t == p:
            tp[t] += 1
    classes = set(support) | set(predicted)
    precs, recs, f1s = [], [], []
    for c in classes:
        prec = tp[c] / predicted[c] if predicted[c] else 0.0
        rec = tp[c] / support[c] if support[c] else 0.0
        precs.append(prec)
        recs.append(rec)
        f1s.append(2 * prec * rec / (prec + rec) if prec + rec > 0 else 0.0)
    n = len(classes)
    return ClassificationScores(
        accuracy=sum(tp.values()) / len(samples),
        f1=math.fsum(f1s) / n,
        precision=math.fsum(precs) / n,
        recall=math.fsum(recs) / n,
    )


@dataclass(frozen=True)
class TopKScores:
    k: int
    accuracy: float
    precision: float
    recall: float
    per_class_precision: Dict[object, float]
    per_class_recall: Dict[object, float]


def topk_metrics(
    samples: Iterable[Tuple[object, Sequence]],
    k: int,
    labels: Optional[Iterable] = None,
) -> TopKScores:
    """accuracy@k plus macro precision@k and recall@k.

    Recall is averaged over classes present in the truth.  Precision is
    averaged over classes present in the truth or in any top-k list; a class
    with support but never ranked in the top k has precision 0.
    """
    samples = list(samples)
    if not samples:
        raise EmptySampleSet("no samples")
    if k < 1:
        raise DataError(f"k must be >= 1, got {k}")
    allowed = None if labels is None else set(labels)
    hits: Counter = Counter()
    support: Counter = Counter()
    in_topk: Counter = Counter()
    n_hit = 0
    for truth, ranked in samples:
        if len(ranked) < k:
            raise DataError(f"ranked list of length {len(ranked)} shorter than k={k}")
        top = list(ranked[:k])
        if allowed is not None:
            for lab in [truth, *top]:
                if lab not in allowed:
                    raise UnknownLabel(f"label {lab!r} is outside the label set")
        support[truth] += 1
        for lab in set(top):
            in_topk[lab] += 1
        if truth in top:
            hits[truth] += 1
            n_hit += 1
    recall = {c: hits[c] / support[c] for c in support}
    precision = {c: (hits[c] / in_topk[c] if in_topk[c] else 0.0) for c in set(support) | set(in_topk)}
    return TopKScores(
        k=k,
        accuracy=n_hit / len(samples),
        precision=math.fsum(precision.values()) / len(precision),
        recall=math.fsum(recall.values()) / len(recall),
        per_class_precision=precision,
        per_class_recall=recall,
    )


def _main_of(label, alphabet) -> str:
    if not isinstance(label, str):
        return main_symbol(label)
    try:
        return main_symbol(parse_label(label, alphabet))
    except DataError as exc:
        raise UnknownLabel(f"cannot map {label!r} to a main symbol: {exc}") from exc


def aggregated_accuracy(samples: Iterable[Tuple[object, object]], g=None) -> float:
    """Accuracy after mapping both sides to their main symbol (a mixture maps
    to the main symbol of its second member)."""
    samples = list(samples)
    if not samples:
        raise EmptySampleSet("no samples")
    alphabet = None if g is None else g.alphabet
    correct = sum(_main_of(t, alphabet) == _main_of(p, alphabet) for t, p in samples)
    return correct / len(samples)


# -- training-loop arithmetic -------------------------------------------------
LOSS_WEIGHTS = {"depth": 10.0, "stones": 0.1, "categorical": 1.0, "horizon": 10.0}
N_CATEGORICAL = 5


def total_loss(depth: float, stones: float, categorical: Sequence[float], horizon: float) -> float:
    """Weighted multitask loss: 10 depth + stones/10 + sum(categorical) + 10 horizon."""
    if len(categorical) != N_CATEGORICAL:
        raise LengthMismatch(f"expected {N_CATEGORICAL} categorical losses, got {len(categorical)}")
    parts = [depth, stones, *categorical, horizon]
    for x in parts:
        if not math.isfinite(x):
            raise DataError(f"loss component {x} is not finite")
        if x < 0:
            raise NegativeLoss(f"loss component {x} is negative")
    return (
        LOSS_WEIGHTS["depth"] * depth
        + stones / 10.0
        + math.fsum(categorical)
        + LOSS_WEIGHTS["horizon"] * horizon
    )


@dataclass(frozen=True)
class Full:
    """Ground truth fed at every epoch."""


@dataclass(frozen=True)
class LinearDecay:
    """Rate falls linearly from 1 at epoch 0 to 0 at ``epochs``."""

    epochs: int


Schedule = Union[Full, LinearDecay]


def teacher_forcing_rate(schedule: Schedule, epoch: int) -> float:
    if epoch < 0:
        raise DataError(f"epoch must be >= 0, got {epoch}")
    if isinstance(schedule, Full):
        return 1.0
    if schedule.epochs <= 0:
        raise NonPositiveEpochCount(f"decay length must be positive, got {schedule.epochs}")
    return max(0.0, 1.0 - epoch / schedule.epochs)
