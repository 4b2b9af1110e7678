"""Nearest-embedding decoding of predicted vectors into ranked labels."""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Iterator, List, Sequence

import numpy as np

from .embed import EmbeddingMatrix
from .errors import DataError, DimensionMismatch, KOutOfRange, ZeroVector

# scores closer than this are treated as ties and fall back to column order
TIE_DECIMALS = 12


@dataclass(frozen=True)
class Prediction:
    vector: np.ndarray
    ranked: List[str]
    scores: List[float]

    @property
    def label(self) -> str:
        return self.ranked[0]

    def to_dict(self) -> dict:
        return {"ranked": self.ranked, "scores": [float(s) for s in self.scores]}


def cosine_scores(m: EmbeddingMatrix, y) -> np.ndarray:
    y = np.asarray(y, dtype=np.float64)
    if y.ndim != 1 or y.shape[0] != m.dim:
        raise DimensionMismatch(f"vector has shape {y.shape}, embeddings have dimension {m.dim}")
    ny = np.linalg.norm(y)
    if not ny > 0.0:
        raise ZeroVector("cannot rank a zero vector")
    return (m.matrix.T @ y) / (np.linalg.norm(m.matrix, axis=0) * ny)


def rank_labels(m: EmbeddingMatrix, y) -> Prediction:
    """Rank every label by cosine similarity to ``y`` (best first)."""
    scores = cosine_scores(m, y)
    order = np.argsort(-np.round(scores, TIE_DECIMALS), kind="stable")
    return Prediction(
        vector=np.asarray(y, dtype=np.float64),
        ranked=[m.labels[i] for i in order],
        scores=[float(scores[i]) for i in order],
    )


def top_k(p: Prediction, k: int) -> List[str]:
    if not 1 <= k <= len(p.ranked):
        raise KOutOfRange(f"k={k} outside 1..{len(p.ranked)}")
    return p.ranked[:k]


def rank_batch(m: EmbeddingMatrix, vectors: Iterable) -> List[Prediction]:
    return [rank_labels(m, y) for y in vectors]


def read_vectors_jsonl(lines: Iterable[str]) -> Iterator[list]:
    """Vectors from JSON lines: a bare array or an object with a ``vector`` key."""
    for lineno, line in enumerate(lines, 1):
        line = line.strip()
        if not line:
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise DataError(f"line {lineno}: invalid JSON ({exc})") from exc
        yield obj["vector"] if isinstance(obj, dict) else obj


def write_predictions_jsonl(preds: Sequence[Prediction]) -> str:
    return "".join(json.dumps(p.to_dict()) + "\n" for p in preds)
