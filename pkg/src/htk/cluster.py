"""Map rare labels onto frequent ones by minimum edit distance."""
from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from . import kernels
from .errors import ConfigError, DataError, EmptyRetainedSet, OverrideTargetNotRetained
from .grammar import MIXTURE_OPERATORS, CANONICAL_OPERATOR, main_symbol, parse_label

DEFAULT_THRESHOLD = 10


def levenshtein(a: str, b: str) -> int:
    """Minimum number of single-character insertions, deletions and substitutions."""
    return kernels.levenshtein(a, b)


def normalize_operators(label: str) -> str:
    for op in MIXTURE_OPERATORS:
        if op != CANONICAL_OPERATOR:
            label = label.replace(op, CANONICAL_OPERATOR)
    return label


def _main_or_none(label: str) -> Optional[str]:
    try:
        return main_symbol(parse_label(label))
    except DataError:
        return None


@dataclass
class ClusterMap:
    threshold: int
    retained: List[str]
    mapping: Dict[str, str]
    overrides: List[Tuple[str, str]] = field(default_factory=list)
    distances: Dict[str, int] = field(default_factory=dict)

    def __call__(self, label: str) -> str:
        return self.map(label)

    def map(self, label: str) -> str:
        key = normalize_operators(label)
        try:
            return self.mapping[key]
        except KeyError:
            raise DataError(f"label {label!r} is unknown to the cluster map") from None

    def to_dict(self) -> dict:
        return {
            "schema": "htk.cluster_map/1",
            "threshold": self.threshold,
            "retained": self.retained,
            "mapping": dict(sorted(self.mapping.items())),
            "overrides": [list(p) for p in self.overrides],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1, ensure_ascii=False)


def build_cluster_map(
    counts: Mapping[str, int],
    threshold: int = DEFAULT_THRESHOLD,
    overrides: Sequence[Tuple[str, str]] = (),
) -> ClusterMap:
    """Keep labels with more than ``threshold`` samples; map every other label
    to its nearest retained label.

    Ties at equal distance go to the candidate sharing the rare label's main
    symbol, then to the candidate with more samples, then lexicographically.
    ``overrides`` (rare -> retained) are applied last.
    """
    merged: Dict[str, int] = {}
    for label, n in counts.items():
        key = normalize_operators(label)
        merged[key] = merged.get(key, 0) + int(n)

    retained = sorted(lab for lab, n in merged.items() if n > threshold)
    if not retained:
        raise EmptyRetainedSet(f"no label has more than {threshold} samples")
    retained_set = set(retained)
    mains = {lab: _main_or_none(lab) for lab in retained}

    mapping = {lab: lab for lab in retained}
    distances = {lab: 0 for lab in retained}
    for rare in sorted(set(merged) - retained_set):
        dists = kernels.levenshtein_to_many(rare, retained)
        rare_main = _main_or_none(rare)

        def key(i):
            cand = retained[i]
            return (
                dists[i],
                0 if rare_main is not None and mains[cand] == rare_main else 1,
                -merged[cand],
                cand,
            )

        best = min(range(len(retained)), key=key)
        mapping[rare] = retained[best]
        distances[rare] = dists[best]

    norm_overrides = []
    for src, dst in overrides:
        src, dst = normalize_operators(src), normalize_operators(dst)
        if dst not in retained_set:
            raise OverrideTargetNotRetained(f"override target {dst!r} is not a retained label")
        if src in retained_set:
            raise DataError(f"override source {src!r} is itself a retained label")
        mapping[src] = dst
        norm_overrides.append((src, dst))

    return ClusterMap(threshold, retained, mapping, norm_overrides, distances)


def read_counts_csv(path) -> Dict[str, int]:
    """``label,count`` rows; an optional header row is skipped."""
    out: Dict[str, int] = {}
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            for lineno, row in enumerate(csv.reader(fh), 1):
                if not row or not "".join(row).strip():
                    continue
                if len(row) != 2:
                    raise DataError(f"{path}:{lineno}: expected 'label,count'")
                label, n = row[0].strip(), row[1].strip()
                if lineno == 1 and not n.lstrip("-").isdigit():
                    continue
                try:
                    out[label] = out.get(label, 0) + int(n)
                except ValueError:
                    raise DataError(f"{path}:{lineno}: count {n!r} is not an integer") from None
    except OSError as exc:
        raise ConfigError(f"cannot read counts file {path}: {exc}") from exc
    return out


def read_overrides_csv(path) -> List[Tuple[str, str]]:
    out = []
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            for lineno, row in enumerate(csv.reader(fh), 1):
                if not row or not "".join(row).strip():
                    continue
                if len(row) != 2:
                    raise DataError(f"{path}:{lineno}: expected 'rare,target'")
                if lineno == 1 and [c.strip().lower() for c in row] in (["rare", "target"], ["source", "target"]):
                    continue
                out.append((row[0].strip(), row[1].strip()))
    except OSError as exc:
        raise ConfigError(f"cannot read overrides file {path}: {exc}") from exc
    return out
