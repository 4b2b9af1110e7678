"""Reference baseline predictions in the evaluation-sample format."""
from __future__ import annotations

from typing import List, Sequence

from .decode import rank_labels
from .embed import EmbeddingMatrix
from .simgen import (
    ProfileRecord,
    RandomRankPredictor,
    RandomVectorPredictor,
    average_depth_baseline,
    mean_stones_baseline,
)


def baseline_samples(
    train: Sequence[ProfileRecord],
    test: Sequence[ProfileRecord],
    m: EmbeddingMatrix,
    seed: int = 0,
    decode: bool = True,
) -> List[dict]:
    """Evaluation samples for ``test`` from the average-depth, mean-stones and
    random-label baselines fitted on ``train``.

    Horizon predictions are random Gaussian vectors.  With ``decode=True``
    they are ranked here and stored as ``ranked_labels``; otherwise the raw
    vectors are stored as ``pred_vectors`` for the evaluator to decode.
    """
    depth = average_depth_baseline(train).sequence
    stones = mean_stones_baseline(train)
    vectors = RandomVectorPredictor(m.dim, seed)
    features = sorted({name for r in list(train) + list(test) for name in r.categorical})
    classes = {
        name: sorted({c for r in list(train) + list(test) for c in r.categorical.get(name, [])})
        for name in features
    }
    rankers = {name: RandomRankPredictor(classes[name], seed + 1 + i) for i, name in enumerate(features)}

    samples = []
    for rec in test:
        n = len(rec.labels)
        ys = vectors(n)
        sample = {
            "id": rec.id,
            "truth_depths": list(rec.depths),
            "pred_depths": list(depth.markers),
            "truth_labels": list(rec.labels),
            "truth_stones": list(rec.stones),
            "pred_stones": [stones] * n,
            "truth_categorical": {k: list(v) for k, v in sorted(rec.categorical.items())},
            "pred_categorical": {name: [rankers[name]() for _ in range(n)] for name in features},
        }
        if decode:
            sample["ranked_labels"] = [rank_labels(m, y).ranked for y in ys]
        else:
            sample["pred_vectors"] = [[float(x) for x in y] for y in ys]
        samples.append(sample)
    return samples
