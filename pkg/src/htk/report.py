"""Assemble per-profile evaluation samples into a metric report.

One sample per profile (JSON line)::

    {"id": "P00001",
     "truth_depths": [0.3, 1.0], "pred_depths": [0.35, 0.996],
     "truth_labels": ["Ah", "Bv"],
     "pred_vectors": [[...], [...]]           # or "ranked_labels": [[...], [...]]
     "truth_stones": [2, 0], "pred_stones": [1.5, 0.4],
     "truth_categorical": {"humus": ["h3", "h1"]},
     "pred_categorical": {"humus": [["h3", "h2", ...], ["h0", ...]]}}

Per-horizon fields are aligned with the truth stripes.  Tabular fields are
optional.
"""
from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence

from .decode import rank_labels
from .embed import EmbeddingMatrix
from .errors import DataError, HtkError, RecordMismatch
from .metrics import (
    DepthSequence,
    aggregated_accuracy,
    classification_metrics,
    iou_1d,
    mse,
    normalize_depths,
    topk_metrics,
)

REPORT_SCHEMA = "htk.eval_report/1"


def _pct(x: float) -> float:
    return round(100.0 * x, 2)


@dataclass
class _Scored:
    id: str
    iou: float
    horizon: List[tuple] = field(default_factory=list)  # (truth, ranked)
    stones: List[tuple] = field(default_factory=list)  # (truth, pred)
    categorical: Dict[str, List[tuple]] = field(default_factory=dict)


def _score_record(rec: dict, m: EmbeddingMatrix, g, epsilon: float) -> _Scored:
    rid = rec.get("id")
    try:
        truth = DepthSequence(tuple(rec["truth_depths"]))
        pred = normalize_depths(rec["pred_depths"], epsilon)
        labels = list(rec["truth_labels"])
    except KeyError as exc:
        raise DataError(f"record {rid}: missing field {exc}") from None
    except HtkError as exc:
        raise type(exc)(f"record {rid}: {exc}") from None
    if len(labels) != len(truth):
        raise RecordMismatch(f"{len(labels)} labels for {len(truth)} stripes", rid)
    out = _Scored(id=rid, iou=iou_1d(pred, truth))

    if "pred_vectors" in rec:
        vectors = rec["pred_vectors"]
        if len(vectors) != len(labels):
            raise RecordMismatch(f"{len(vectors)} vectors for {len(labels)} horizons", rid)
        ranked = []
        for v in vectors:
            if len(v) != m.dim:
                raise RecordMismatch(f"vector of length {len(v)}, embeddings have dimension {m.dim}", rid)
            ranked.append(rank_labels(m, v).ranked)
    elif "ranked_labels" in rec:
        ranked = [list(r) for r in rec["ranked_labels"]]
        if len(ranked) != len(labels):
            raise RecordMismatch(f"{len(ranked)} rankings for {len(labels)} horizons", rid)
    else:
        raise DataError(f"record {rid}: needs 'pred_vectors' or 'ranked_labels'")
    for t, r in zip(labels, ranked):
        if t not in m:
            raise RecordMismatch(f"truth label {t!r} has no embedding", rid)
        if g is not None and t not in g:
            raise RecordMismatch(f"truth label {t!r} is not in the taxonomy", rid)
        for lab in r:
            if lab not in m:
                raise RecordMismatch(f"ranked label {lab!r} has no embedding", rid)
        out.horizon.append((m.labels[m.index(t)], [m.labels[m.index(x)] for x in r]))

    if "truth_stones" in rec or "pred_stones" in rec:
        ts, ps = rec.get("truth_stones", []), rec.get("pred_stones", [])
        if len(ts) != len(labels) or len(ps) != len(labels):
            raise RecordMismatch("stones lists must match the horizon count", rid)
        out.stones = list(zip(ts, ps))
    tc, pc = rec.get("truth_categorical", {}), rec.get("pred_categorical", {})
    if set(tc) != set(pc):
        raise RecordMismatch("truth and predicted categorical features differ", rid)
    for name in sorted(tc):
        t, p = tc[name], pc[name]
        if len(t) != len(labels) or len(p) != len(labels):
            raise RecordMismatch(f"feature {name!r} must have one entry per horizon", rid)
        out.categorical[name] = [(a, list(b) if isinstance(b, list) else [b]) for a, b in zip(t, p)]
    return out


def _ranked_block(pairs, ks) -> dict:
    top1 = [(t, r[0]) for t, r in pairs]
    cls = classification_metrics(top1)
    block = {
        "accuracy": _pct(cls.accuracy),
        "f1": _pct(cls.f1),
        "precision": _pct(cls.precision),
        "recall": _pct(cls.recall),
    }
    for k in ks:
        usable = min(k, min(len(r) for _, r in pairs))
        tk = topk_metrics(pairs, usable)
        block[f"acc@{k}"] = _pct(tk.accuracy)
        block[f"prec@{k}"] = _pct(tk.precision)
        block[f"rec@{k}"] = _pct(tk.recall)
    return block


def evaluate_samples(
    samples: Sequence[dict],
    m: EmbeddingMatrix,
    g=None,
    ks: Iterable[int] = (1, 5),
    epsilon: float = 0.01,
    jobs: int = 1,
) -> dict:
    """Score every sample and aggregate into a report dictionary.

    Rates are percentages rounded to two decimals.  Aggregation order is the
    sample order regardless of ``jobs``.
    """
    samples = list(samples)
    if not samples:
        raise DataError("no evaluation samples")
    ks = sorted(set(int(k) for k in ks))
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as ex:
            scored = list(ex.map(lambda r: _score_record(r, m, g, epsilon), samples))
    else:
        scored = [_score_record(r, m, g, epsilon) for r in samples]

    horizon = [pair for s in scored for pair in s.horizon]
    report = {
        "schema": REPORT_SCHEMA,
        "n_profiles": len(scored),
        "n_horizons": len(horizon),
        "depth": {"iou": _pct(sum(s.iou for s in scored) / len(scored))},
    }
    stones = [pair for s in scored for pair in s.stones]
    if stones:
        report["stones"] = {"mse": round(mse([p for _, p in stones], [t for t, _ in stones]), 4)}
    features = sorted({name for s in scored for name in s.categorical})
    if features:
        report["categorical"] = {
            name: _ranked_block([p for s in scored for p in s.categorical.get(name, [])], ks)
            for name in features
        }
    if horizon:
        block = _ranked_block(horizon, ks)
        block["agg_acc"] = _pct(aggregated_accuracy([(t, r[0]) for t, r in horizon], g))
        report["horizon"] = block
    return report


def report_to_json(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=False) + "\n"
