"""Unit-sphere label embeddings whose dot products reproduce LCA similarities.

Non-mixture leaves are placed one at a time.  Leaf ``k`` gets coordinates
``0..k-1`` from a lower-triangular solve against the ``k`` leaves placed before
it and a fresh coordinate ``k`` that brings its norm to one.  Mixture columns
are the normalized 1:2 combination of their two member columns.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional

import numpy as np

from . import kernels
from .errors import (
    ConfigError,
    DataError,
    InfeasibleHierarchy,
    ParentNotEmbedded,
    SameMainSymbol,
    SingularStep,
)
from .grammar import Mixture, parse_label, render_label
from .taxonomy import (
    B1_CASE_VALUES,
    MIXTURE_WEIGHTS,
    TaxonomyGraph,
    b1_case,
    lca_similarity,
    required_similarity_matrix,
)

RADICAND_TOL = 1e-9
PIVOT_TOL = 1e-12


@dataclass
class EmbeddingMatrix:
    """``dim x N`` matrix of unit label embeddings; column ``i`` is ``labels[i]``."""

    matrix: np.ndarray
    labels: List[str]
    n_simple: Optional[int] = None
    _index: Dict[str, int] = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self.matrix = np.asarray(self.matrix, dtype=np.float64)
        if self.matrix.ndim != 2 or self.matrix.shape[1] != len(self.labels):
            raise DataError(
                f"matrix shape {self.matrix.shape} does not match {len(self.labels)} labels"
            )
        self._index = {lab: i for i, lab in enumerate(self.labels)}
        if len(self._index) != len(self.labels):
            raise DataError("duplicate column labels")
        if self.n_simple is None:
            self.n_simple = sum(1 for lab in self.labels if not _is_mixture_str(lab))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def n_labels(self) -> int:
        return self.matrix.shape[1]

    @property
    def shape_text(self) -> str:
        return f"{self.dim} x {self.n_labels}"

    def index(self, label: str) -> int:
        if isinstance(label, str) and label in self._index:
            return self._index[label]
        try:
            return self._index[_canon(label)]
        except KeyError:
            raise ParentNotEmbedded(f"label {label!r} has no embedding column") from None

    def __contains__(self, label) -> bool:
        return label in self._index or _canon(label) in self._index

    def column(self, label: str) -> np.ndarray:
        return self.matrix[:, self.index(label)]

    def gram(self) -> np.ndarray:
        return self.matrix.T @ self.matrix

    # -- serialization ---------------------------------------------------
    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.labels)
        for row in self.matrix:
            w.writerow([_fmt(x) for x in row])
        return buf.getvalue()

    def to_json(self) -> str:
        payload = {
            "schema": "htk.embeddings/1",
            "dim": self.dim,
            "labels": self.labels,
            "columns": {
                lab: [float(_fmt(x)) for x in self.matrix[:, i]] for i, lab in enumerate(self.labels)
            },
        }
        return json.dumps(payload, indent=1)

    @classmethod
    def from_csv(cls, text: str) -> "EmbeddingMatrix":
        rows = list(csv.reader(io.StringIO(text)))
        if not rows:
            raise ConfigError("empty embedding CSV")
        labels, body = rows[0], rows[1:]
        try:
            mat = np.array([[float(x) for x in r] for r in body], dtype=np.float64)
        except ValueError as exc:
            raise ConfigError(f"non-numeric entry in embedding CSV: {exc}") from exc
        return cls(mat.reshape(len(body), len(labels)), labels)

    @classmethod
    def from_json(cls, text: str) -> "EmbeddingMatrix":
        data = json.loads(text)
        labels = data.get("labels") or list(data["columns"])
        cols = [data["columns"][lab] for lab in labels]
        return cls(np.array(cols, dtype=np.float64).T.reshape(int(data["dim"]), len(labels)), labels)

    def save(self, path, fmt: Optional[str] = None) -> None:
        fmt = fmt or _fmt_from_suffix(path)
        Path(path).write_text(self.to_csv() if fmt == "csv" else self.to_json(), encoding="utf-8")

    @classmethod
    def load(cls, path, fmt: Optional[str] = None) -> "EmbeddingMatrix":
        fmt = fmt or _fmt_from_suffix(path)
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read embeddings {path}: {exc}") from exc
        try:
            return cls.from_csv(text) if fmt == "csv" else cls.from_json(text)
        except (KeyError, ValueError) as exc:
            raise ConfigError(f"malformed embedding file {path}: {exc}") from exc


def _fmt(x: float) -> str:
    # 17 significant digits round-trip every double exactly
    return format(float(x), ".17g")


def _fmt_from_suffix(path) -> str:
    return "csv" if str(path).lower().endswith(".csv") else "json"


def _canon(label) -> str:
    if isinstance(label, str):
        try:
            return render_label(parse_label(label))
        except DataError:
            return label
    return render_label(label)


def _is_mixture_str(label: str) -> bool:
    try:
        return isinstance(parse_label(label), Mixture)
    except DataError:
        return False


def _combine(p1: np.ndarray, p2: np.ndarray) -> np.ndarray:
    v = MIXTURE_WEIGHTS[0] * p1 + MIXTURE_WEIGHTS[1] * p2
    return v / np.linalg.norm(v)


def mixture_embedding(m: EmbeddingMatrix, parent1, parent2) -> np.ndarray:
    """Unit vector along ``(1/3) φ(parent1) + (2/3) φ(parent2)``."""
    a = parse_label(_canon(parent1))
    b = parse_label(_canon(parent2))
    for p in (a, b):
        if isinstance(p, Mixture):
            raise ParentNotEmbedded(f"mixture parent must be a non-mixture label, got {p}")
    if a.main == b.main:
        raise SameMainSymbol(f"mixture parents {a} and {b} share main symbol {a.main!r}")
    return _combine(m.column(render_label(a)), m.column(render_label(b)))


def embed_taxonomy(g: TaxonomyGraph) -> EmbeddingMatrix:
    """Embed every leaf of ``g``; column order follows ``g``'s leaf order."""
    simple = g.non_mixture
    d = len(simple)
    if d == 0:
        raise DataError("taxonomy has no non-mixture labels to embed")
    n = len(g.leaves)
    mat = np.zeros((d, n), dtype=np.float64)

    for k, h in enumerate(simple):
        if k:
            pivots = np.diagonal(mat[:k, :k])
            j = int(np.argmin(pivots))
            if pivots[j] < PIVOT_TOL:
                raise SingularStep(
                    f"pivot of {simple[j]} is {pivots[j]:.3g}; cannot place {h}",
                    pair=(render_label(simple[j]), render_label(h)),
                )
            rhs = np.array([lca_similarity(g, h, simple[j]) for j in range(k)])
            # row j of the system is the embedding of leaf j (zero above coordinate j)
            partial = kernels.forward_substitute(mat[:k, :k].T, rhs)
        else:
            partial = np.zeros(0)
        radicand = 1.0 - float(partial @ partial)
        if radicand < -RADICAND_TOL:
            j = int(np.argmax(np.abs(partial)))
            raise InfeasibleHierarchy(
                f"required similarities for {h} are inconsistent (1 - |partial|^2 = {radicand:.3g})",
                pair=(render_label(h), render_label(simple[j])),
            )
        mat[:k, k] = partial
        mat[k, k] = math.sqrt(max(radicand, 0.0))

    for col in range(d, n):
        h = g.leaves[col]
        cols = []
        for member in (h.first, h.second):
            key = render_label(member)
            if key not in g or isinstance(g.leaf(key), Mixture):
                raise ParentNotEmbedded(f"mixture {h} needs member {key!r} as a non-mixture leaf")
            cols.append(mat[:, g.index(key)])
        mat[:, col] = _combine(*cols)

    return EmbeddingMatrix(mat, g.labels, n_simple=d)


@dataclass
class IdentityReport:
    """Deviation of embedding dot products from their closed-form targets."""

    tol: float
    max_deviation: float
    max_norm_deviation: float
    # case id -> {"pairs", "max_deviation", "expected"}
    cases: Dict[str, dict]
    worst_pair: Optional[tuple] = None

    @property
    def passed(self) -> bool:
        return self.max_deviation <= self.tol and self.max_norm_deviation <= self.tol

    def to_dict(self) -> dict:
        return {
            "tol": self.tol,
            "passed": self.passed,
            "max_deviation": self.max_deviation,
            "max_norm_deviation": self.max_norm_deviation,
            "worst_pair": list(self.worst_pair) if self.worst_pair else None,
            "cases": self.cases,
        }


def verify_identities(m: EmbeddingMatrix, g: TaxonomyGraph, tol: float = 1e-9) -> IdentityReport:
    """Compare every leaf-pair dot product with ``required_similarity``.

    Pairs are grouped by invariance-table case.  For enumerated cases the
    deviation is also measured against the tabulated constant.
    """
    if m.labels != g.labels:
        raise DataError("embedding columns do not match the taxonomy leaves")
    gram = m.gram()
    target = required_similarity_matrix(g)
    dev = np.abs(gram - target)
    norm_dev = float(np.max(np.abs(np.sqrt(np.diag(gram)) - 1.0)))
    cases: Dict[str, dict] = {}
    labels = g.labels
    worst, worst_pair = -1.0, None
    for i in range(len(labels)):
        for j in range(i, len(labels)):
            case = b1_case(g, labels[i], labels[j])
            e = float(dev[i, j])
            const = B1_CASE_VALUES.get(case)
            if const is not None:
                e = max(e, abs(float(gram[i, j]) - const))
            entry = cases.setdefault(case, {"pairs": 0, "max_deviation": 0.0, "expected": const})
            entry["pairs"] += 1
            entry["max_deviation"] = max(entry["max_deviation"], e)
            if e > worst:
                worst, worst_pair = e, (labels[i], labels[j])
    return IdentityReport(
        tol=tol,
        max_deviation=max(worst, 0.0),
        max_norm_deviation=norm_dev,
        cases=dict(sorted(cases.items())),
        worst_pair=worst_pair,
    )


def gram_deviation(m: EmbeddingMatrix, g: TaxonomyGraph) -> float:
    """Largest ``|φᵢ·φⱼ - required_similarity|`` over all leaf pairs."""
    return float(np.max(np.abs(m.gram() - required_similarity_matrix(g))))
