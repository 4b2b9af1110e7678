"""Seeded synthetic soil-profile records, dataset splits and reference baselines.

The generator only produces the targets a model would be scored on (depth
markers, horizon labels, stones counts and categorical features); there are
no images.
"""
from __future__ import annotations

import json
from collections import Counter
from dataclasses import asdict, dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .errors import DataError, EmptyTrainingSet, InvalidConfig, TooFewRecords
from .metrics import DEFAULT_EPSILON, STOP_VALUE, DepthSequence

MIN_HORIZONS, MAX_HORIZONS = 2, 8
MAX_STONES = 100

# class-name prefixes for the categorical horizon features
DEFAULT_CATEGORICAL = {
    "soil_type": 17,
    "soil_color": 74,
    "carbonate": 7,
    "humus": 8,
    "rooting": 7,
}
_PREFIX = {"soil_type": "T", "soil_color": "K", "carbonate": "C", "humus": "h", "rooting": "W"}


def class_names(feature: str, n: int) -> List[str]:
    prefix = _PREFIX.get(feature, f"{feature}_")
    return [f"{prefix}{i}" for i in range(n)]


@dataclass
class GeneratorConfig:
    seed: int = 7
    n_profiles: int = 100
    # relative weights of 2, 3, ..., 8 horizons per profile
    horizon_weights: List[float] = field(default_factory=lambda: [3, 6, 7, 5, 3, 1, 1])
    # Zipf exponent of the label frequency distribution (0 = uniform)
    label_skew: float = 1.0
    categorical_classes: Dict[str, int] = field(default_factory=lambda: dict(DEFAULT_CATEGORICAL))
    mean_stones: float = 8.0

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        w = self.horizon_weights
        if len(w) != MAX_HORIZONS - MIN_HORIZONS + 1:
            raise InvalidConfig(f"horizon_weights needs {MAX_HORIZONS - MIN_HORIZONS + 1} entries")
        if any(x < 0 for x in w) or sum(w) <= 0:
            raise InvalidConfig("horizon_weights must be non-negative with a positive sum")
        if not isinstance(self.n_profiles, int) or self.n_profiles < 0:
            raise InvalidConfig("n_profiles must be a non-negative integer")
        if self.label_skew < 0:
            raise InvalidConfig("label_skew must be >= 0")
        if self.mean_stones < 0:
            raise InvalidConfig("mean_stones must be >= 0")
        for name, n in self.categorical_classes.items():
            if not isinstance(n, int) or n < 1:
                raise InvalidConfig(f"categorical feature {name!r} needs a positive class count")

    @classmethod
    def from_dict(cls, data: dict) -> "GeneratorConfig":
        known = set(cls.__dataclass_fields__)
        unknown = set(data) - known - {"schema"}
        if unknown:
            raise InvalidConfig(f"unknown config keys: {sorted(unknown)}")
        try:
            return cls(**{k: v for k, v in data.items() if k in known})
        except TypeError as exc:
            raise InvalidConfig(str(exc)) from exc

    def to_dict(self) -> dict:
        return {"schema": "htk.generator_config/1", **asdict(self)}


@dataclass
class ProfileRecord:
    id: str
    depths: List[float]
    labels: List[str]
    stones: List[int]
    categorical: Dict[str, List[str]]

    @property
    def depth_sequence(self) -> DepthSequence:
        return DepthSequence(tuple(self.depths))

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "depths": self.depths,
            "labels": self.labels,
            "stones": self.stones,
            "categorical": self.categorical,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ProfileRecord":
        try:
            rec = cls(
                id=str(data["id"]),
                depths=[float(x) for x in data["depths"]],
                labels=list(data["labels"]),
                stones=[int(x) for x in data["stones"]],
                categorical={k: list(v) for k, v in data["categorical"].items()},
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise DataError(f"malformed profile record: {exc}") from exc
        n = len(rec.depths)
        if len(rec.labels) != n or len(rec.stones) != n or any(len(v) != n for v in rec.categorical.values()):
            raise DataError(f"record {rec.id}: per-stripe fields disagree in length")
        return rec


def _zipf(n: int, skew: float) -> np.ndarray:
    w = 1.0 / np.arange(1, n + 1, dtype=np.float64) ** skew
    return w / w.sum()


def generate(config: GeneratorConfig, g) -> List[ProfileRecord]:
    """Draw ``config.n_profiles`` records over the leaves of taxonomy ``g``."""
    config.validate()
    labels = g.labels
    if not labels:
        raise InvalidConfig("taxonomy has no labels")
    rng = np.random.default_rng(config.seed)
    # which label is frequent is itself seeded
    label_order = [labels[i] for i in rng.permutation(len(labels))]
    label_p = _zipf(len(labels), config.label_skew)
    cats = {name: class_names(name, n) for name, n in sorted(config.categorical_classes.items())}
    cat_p = {name: _zipf(len(names), 1.0) for name, names in cats.items()}
    hw = np.asarray(config.horizon_weights, dtype=np.float64)
    hw = hw / hw.sum()
    # internal boundaries in whole centimetres, clear of the stop margin
    max_cm = int(round((STOP_VALUE - 2 * DEFAULT_EPSILON) * 100))

    records = []
    width = max(5, len(str(config.n_profiles)))
    for idx in range(config.n_profiles):
        d = MIN_HORIZONS + int(rng.choice(len(hw), p=hw))
        cuts = np.sort(rng.choice(np.arange(1, max_cm + 1), size=d - 1, replace=False))
        depths = [int(c) / 100 for c in cuts] + [STOP_VALUE]
        lab = [label_order[i] for i in rng.choice(len(labels), size=d, p=label_p)]
        stones = [min(MAX_STONES, int(x)) for x in rng.exponential(config.mean_stones, size=d)]
        categorical = {
            name: [names[i] for i in rng.choice(len(names), size=d, p=cat_p[name])]
            for name, names in cats.items()
        }
        records.append(ProfileRecord(f"P{idx:0{width}d}", depths, lab, stones, categorical))
    return records


def records_to_jsonl(records: Iterable[ProfileRecord]) -> str:
    return "".join(json.dumps(r.to_dict(), sort_keys=True) + "\n" for r in records)


def records_from_jsonl(lines: Iterable[str]) -> List[ProfileRecord]:
    out = []
    for lineno, line in enumerate(lines, 1):
        if not line.strip():
            continue
        try:
            out.append(ProfileRecord.from_dict(json.loads(line)))
        except json.JSONDecodeError as exc:
            raise DataError(f"line {lineno}: invalid JSON ({exc})") from exc
    return out


# -- splitting -------------------------------------------------------------
def stratified_split(
    records: Sequence[ProfileRecord],
    fractions: Tuple[float, float, float] = (0.6, 0.2, 0.2),
    seed: int = 0,
) -> Tuple[List[ProfileRecord], List[ProfileRecord], List[ProfileRecord]]:
    """Greedy iterative multilabel stratification on each record's set of
    horizon labels.

    The rarest unassigned label is handled first; each record carrying it goes
    to the split that still needs most of that label, then the split that
    still needs most records, then a seeded random choice.  Split sizes are
    fixed up front (largest-remainder rounding of ``fractions * n``) and a
    full split receives no further records.
    """
    fr = [float(f) for f in fractions]
    if len(fr) != 3 or any(f < 0 for f in fr) or abs(sum(fr) - 1.0) > 1e-9:
        raise DataError(f"fractions must be three non-negative numbers summing to 1, got {fractions}")
    n = len(records)
    active = [i for i, f in enumerate(fr) if f > 0]
    need_size = _split_sizes(fr, n)
    if any(need_size[s] == 0 for s in active):
        raise TooFewRecords(f"{n} records cannot fill every non-empty split of {tuple(fr)}")
    rng = np.random.default_rng(seed)
    label_sets = [frozenset(r.labels) for r in records]
    totals = Counter(lab for s in label_sets for lab in s)
    need = {lab: [f * c for f in fr] for lab, c in totals.items()}
    assign = [-1] * n
    remaining = [int(i) for i in rng.permutation(n)]

    def pick(scores):
        open_splits = [s for s in active if need_size[s] > 0]
        best = max(scores[s] for s in open_splits)
        tied = [s for s in open_splits if scores[s] == best]
        if len(tied) > 1:
            best2 = max(need_size[s] for s in tied)
            tied = [s for s in tied if need_size[s] == best2]
        return tied[0] if len(tied) == 1 else tied[int(rng.integers(len(tied)))]

    def place(i, s):
        assign[i] = s
        need_size[s] -= 1
        for lab in label_sets[i]:
            need[lab][s] -= 1

    left = Counter(totals)
    while remaining:
        open_labels = [lab for lab, c in left.items() if c > 0]
        if not open_labels:
            for i in remaining:
                place(i, pick(need_size))
            break
        lab = min(open_labels, key=lambda x: (left[x], x))
        carriers = [i for i in remaining if lab in label_sets[i]]
        for i in carriers:
            place(i, pick(need[lab]))
            for other in label_sets[i]:
                left[other] -= 1
        chosen = set(carriers)
        remaining = [i for i in remaining if i not in chosen]

    out = ([], [], [])
    for i, s in enumerate(assign):
        out[s].append(records[i])
    return out


def _split_sizes(fractions: Sequence[float], n: int) -> List[int]:
    raw = [f * n for f in fractions]
    sizes = [int(np.floor(x + 1e-9)) for x in raw]
    by_remainder = sorted(range(len(raw)), key=lambda i: (-(raw[i] - sizes[i]), i))
    for i in by_remainder[: n - sum(sizes)]:
        sizes[i] += 1
    return sizes


def random_split(records, fractions=(0.6, 0.2, 0.2), seed: int = 0):
    """Plain seeded shuffle-and-cut split, the reference for stratification."""
    n = len(records)
    perm = np.random.default_rng(seed).permutation(n)
    sizes = _split_sizes([float(f) for f in fractions], n)
    a, b = sizes[0], sizes[0] + sizes[1]
    return tuple([records[int(i)] for i in perm[lo:hi]] for lo, hi in ((0, a), (a, b), (b, n)))


def max_label_deviation(records, splits) -> float:
    """Largest gap between a label's share of records in a split and its
    share in the whole set (empty splits ignored)."""
    def shares(rs):
        c = Counter(lab for r in rs for lab in set(r.labels))
        return {lab: v / len(rs) for lab, v in c.items()}

    overall = shares(records)
    worst = 0.0
    for part in splits:
        if not part:
            continue
        s = shares(part)
        for lab, v in overall.items():
            worst = max(worst, abs(s.get(lab, 0.0) - v))
    return worst


def split_manifest(splits) -> dict:
    return {name: [r.id for r in part] for name, part in zip(("train", "val", "test"), splits)}


# -- baselines ----------------------------------------------------------------
@dataclass(frozen=True)
class AverageDepthBaseline:
    """Predicts the same depth sequence for every profile."""

    sequence: DepthSequence

    def __call__(self, record=None) -> DepthSequence:
        return self.sequence


def average_depth_baseline(train: Sequence[ProfileRecord]) -> AverageDepthBaseline:
    """Per-position mean of the internal markers, at the modal profile length.

    Records too short to have a given internal marker are skipped for that
    position.  Means that break strict monotonicity or fall inside the stop
    margin are dropped so the result is always a valid sequence.
    """
    if not train:
        raise EmptyTrainingSet("cannot average an empty training set")
    lengths = Counter(len(r.depths) for r in train)
    modal = min(lengths, key=lambda L: (-lengths[L], L))
    means = []
    for pos in range(modal - 1):
        vals = [r.depths[pos] for r in train if len(r.depths) - 1 > pos]
        means.append(float(np.mean(vals)))
    markers = []
    for x in means:
        if x >= STOP_VALUE - DEFAULT_EPSILON:
            break
        if markers and x <= markers[-1]:
            continue
        markers.append(x)
    return AverageDepthBaseline(DepthSequence(tuple(markers) + (STOP_VALUE,)))


class RandomVectorPredictor:
    """Draws an isotropic Gaussian vector per horizon; decoding it gives a
    uniformly random label ranking biased only by the embedding geometry."""

    def __init__(self, dim: int, seed: int = 0):
        self.dim = dim
        self.rng = np.random.default_rng(seed)

    def __call__(self, n: int) -> np.ndarray:
        return self.rng.standard_normal((n, self.dim))


class RandomRankPredictor:
    """Seeded random permutation of a class list per call."""

    def __init__(self, classes: Sequence[str], seed: int = 0):
        self.classes = list(classes)
        self.rng = np.random.default_rng(seed)

    def __call__(self) -> List[str]:
        return [self.classes[i] for i in self.rng.permutation(len(self.classes))]


def mean_stones_baseline(train: Sequence[ProfileRecord]) -> float:
    if not train:
        raise EmptyTrainingSet("cannot average an empty training set")
    vals = [s for r in train for s in r.stones]
    return float(np.mean(vals))
