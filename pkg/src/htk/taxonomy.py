"""Rooted label DAG: root -> main symbols -> leaf labels.

Non-mixture leaves hang below their main-symbol node.  A mixture leaf has two
parents, the main-symbol nodes of its two members, which is what makes the
graph a DAG rather than a tree.

Similarity between two non-mixture leaves is ``1 - height(LCA) / height(root)``.
For the two-level hierarchy this yields 1 for a leaf with itself, 1/2 for two
leaves sharing a main symbol and 0 otherwise.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

from .errors import (
    ConfigError,
    DanglingMixtureParent,
    DuplicateLabel,
    LabelNotInTaxonomy,
    MixtureNotAllowed,
)
from .grammar import (
    HorizonLabel,
    Mixture,
    ModifierRules,
    SimpleLabel,
    main_symbol,
    parse_label,
    render_label,
)

SCHEMA = "htk.taxonomy/1"
ROOT = "ROOT"

# Weights of the (first, second) member in a mixture embedding.
MIXTURE_WEIGHTS = (1.0 / 3.0, 2.0 / 3.0)

_SQRT5 = math.sqrt(5.0)

# Closed-form inner products for every enumerated case of the invariance table
# (two-level hierarchy, 1/3 : 2/3 mixture weights).
B1_CASE_VALUES: Dict[str, float] = {
    "self": 1.0,
    "1": 0.0,
    "2": 0.5,
    "3.1-first": 1.0 / _SQRT5,
    "3.1-second": 2.0 / _SQRT5,
    "3.2-first": 1.0 / (2.0 * _SQRT5),
    "3.2-second": 1.0 / _SQRT5,
    "4.1.1": 4.0 / 5.0,
    "4.1.2": 1.0 / 5.0,
    "4.1.3": 2.0 / 5.0,
    "4.2.1": 1.0 / 10.0,
    "4.2.2": 1.0 / 2.0,
    "4.2.3": 1.0 / 5.0,
    "4.2.4": 2.0 / 5.0,
    "4.2.5": 2.0 / 5.0,
}
# Mixture pairs whose member relations match none of the enumerated patterns
# (e.g. Ah-Bv vs Al-Bv).  Their value still follows the bilinear closed form.
OTHER_CASE = "other"


def main_node(symbol: str) -> str:
    return f"main:{symbol}"


def leaf_node(label: str) -> str:
    return f"leaf:{label}"


@dataclass
class TaxonomyGraph:
    alphabet: Tuple[str, ...]
    leaves: Tuple[HorizonLabel, ...]
    children: Dict[str, Tuple[str, ...]]
    parents: Dict[str, Tuple[str, ...]]
    heights: Dict[str, int]
    rules: Optional[ModifierRules] = None
    leaf_order: str = "sorted"
    _index: Dict[str, int] = field(default_factory=dict, repr=False)
    _ancestors: Dict[str, frozenset] = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self._index = {render_label(h): i for i, h in enumerate(self.leaves)}

    # -- basic views -----------------------------------------------------
    @property
    def labels(self) -> List[str]:
        """Rendered leaf labels in leaf order."""
        return [render_label(h) for h in self.leaves]

    @property
    def non_mixture(self) -> List[HorizonLabel]:
        return [h for h in self.leaves if not isinstance(h, Mixture)]

    @property
    def mixtures(self) -> List[Mixture]:
        return [h for h in self.leaves if isinstance(h, Mixture)]

    @property
    def main_symbols(self) -> List[str]:
        return sorted(c.split(":", 1)[1] for c in self.children[ROOT])

    @property
    def nodes(self) -> List[str]:
        return list(self.heights)

    @property
    def edges(self) -> List[Tuple[str, str]]:
        return [(p, c) for p, cs in self.children.items() for c in cs]

    @property
    def max_height(self) -> int:
        return self.heights[ROOT]

    def __len__(self) -> int:
        return len(self.leaves)

    def __contains__(self, label) -> bool:
        return label in self._index or self._key(label) in self._index

    def index(self, label) -> int:
        if isinstance(label, str) and label in self._index:
            return self._index[label]
        key = self._key(label)
        try:
            return self._index[key]
        except KeyError:
            raise LabelNotInTaxonomy(f"label {key!r} is not a leaf of the taxonomy") from None

    def leaf(self, label) -> HorizonLabel:
        return self.leaves[self.index(label)]

    def parse(self, s: str) -> HorizonLabel:
        return parse_label(s, self.alphabet, self.rules)

    @staticmethod
    def _key(label) -> str:
        if isinstance(label, str):
            # accept any mixture operator
            try:
                return render_label(parse_label(label))
            except Exception:
                return label
        return render_label(label)

    # -- structure -------------------------------------------------------
    def ancestors(self, node: str) -> frozenset:
        """Node plus all its ancestors."""
        if node not in self._ancestors:
            out = {node}
            for p in self.parents.get(node, ()):
                out |= self.ancestors(p)
            self._ancestors[node] = frozenset(out)
        return self._ancestors[node]

    def lca(self, a: str, b: str) -> str:
        """Lowest (minimum-height) common ancestor of two nodes."""
        common = self.ancestors(a) & self.ancestors(b)
        return min(common, key=lambda n: (self.heights[n], n))

    def height(self, node: str) -> int:
        return self.heights[node]


def _topo_heights(children: Dict[str, Tuple[str, ...]]) -> Dict[str, int]:
    heights: Dict[str, int] = {}

    def visit(n, stack):
        if n in heights:
            return heights[n]
        if n in stack:
            raise ConfigError(f"cycle through node {n!r}")
        stack.add(n)
        kids = children.get(n, ())
        h = 0 if not kids else 1 + max(visit(c, stack) for c in kids)
        stack.discard(n)
        heights[n] = h
        return h

    visit(ROOT, set())
    return heights


def _sort_key(h: HorizonLabel):
    return (main_symbol(h), render_label(h))


def build_taxonomy(
    labels: Iterable[Union[str, HorizonLabel]],
    alphabet: Optional[Iterable[str]] = None,
    rules: Optional[ModifierRules] = None,
    leaf_order: str = "sorted",
) -> TaxonomyGraph:
    """Build the label DAG.

    ``leaf_order="sorted"`` puts non-mixture leaves first, grouped by main
    symbol (alphabetical) and sorted within each group, then the mixtures
    sorted by their rendered string.  ``leaf_order="given"`` keeps the input
    order within the non-mixture and mixture blocks.
    """
    if leaf_order not in ("sorted", "given"):
        raise ConfigError(f"unknown leaf_order {leaf_order!r}")
    alpha = None if alphabet is None else frozenset(alphabet)
    parsed: List[HorizonLabel] = []
    seen = set()
    for lab in labels:
        h = parse_label(lab, alpha, rules) if isinstance(lab, str) else lab
        if rules is not None and not isinstance(lab, str):
            parse_label(render_label(h), alpha, rules)
        key = render_label(h)
        if key in seen:
            raise DuplicateLabel(f"duplicate label {key!r}")
        seen.add(key)
        parsed.append(h)

    simple = [h for h in parsed if not isinstance(h, Mixture)]
    mixed = [h for h in parsed if isinstance(h, Mixture)]
    mains = sorted({h.main for h in simple})
    for m in mixed:
        for member in (m.first, m.second):
            if member.main not in mains:
                raise DanglingMixtureParent(
                    f"mixture {m} needs main symbol {member.main!r}, which has no non-mixture leaf"
                )
    if leaf_order == "sorted":
        simple.sort(key=_sort_key)
        mixed.sort(key=render_label)
    leaves = tuple(simple + mixed)

    children: Dict[str, List[str]] = {ROOT: [main_node(s) for s in mains]}
    parents: Dict[str, List[str]] = {ROOT: []}
    for s in mains:
        children[main_node(s)] = []
        parents[main_node(s)] = [ROOT]
    for h in leaves:
        node = leaf_node(render_label(h))
        if isinstance(h, Mixture):
            ps = [main_node(h.first.main), main_node(h.second.main)]
        else:
            ps = [main_node(h.main)]
        parents[node] = ps
        children[node] = []
        for p in ps:
            children[p].append(node)

    if alpha is None:
        alpha = frozenset(mains)
    return TaxonomyGraph(
        alphabet=tuple(sorted(alpha)),
        leaves=leaves,
        children={k: tuple(v) for k, v in children.items()},
        parents={k: tuple(v) for k, v in parents.items()},
        heights=_topo_heights({k: tuple(v) for k, v in children.items()}),
        rules=rules,
        leaf_order=leaf_order,
    )


def lca_similarity(g: TaxonomyGraph, h_i, h_j) -> float:
    """``1 - height(LCA) / height(root)`` for two non-mixture leaves."""
    a, b = g.leaf(h_i), g.leaf(h_j)
    for h in (a, b):
        if isinstance(h, Mixture):
            raise MixtureNotAllowed(f"LCA similarity is defined for non-mixture labels only, got {h}")
    if a == b:
        return 1.0
    node = g.lca(leaf_node(render_label(a)), leaf_node(render_label(b)))
    return 1.0 - g.height(node) / g.max_height


def _member_terms(g: TaxonomyGraph, h: HorizonLabel) -> List[Tuple[float, HorizonLabel]]:
    """Unnormalized weighted members of a leaf (a simple leaf is itself, weight 1)."""
    if not isinstance(h, Mixture):
        return [(1.0, h)]
    for member in (h.first, h.second):
        if render_label(member) not in g:
            raise LabelNotInTaxonomy(f"mixture member {member} of {h} is not a leaf of the taxonomy")
    return [(MIXTURE_WEIGHTS[0], h.first), (MIXTURE_WEIGHTS[1], h.second)]


def _bilinear(g, terms_a, terms_b) -> float:
    return sum(wa * wb * lca_similarity(g, a, b) for wa, a in terms_a for wb, b in terms_b)


def required_similarity(g: TaxonomyGraph, h_i, h_j) -> float:
    """Closed-form target inner product of two leaves.

    Expands each mixture into its weighted members and evaluates the
    normalized bilinear form over member similarities.  No embedding is
    involved, so this serves as the independent oracle for embedding tests.
    """
    a, b = g.leaf(h_i), g.leaf(h_j)
    ta, tb = _member_terms(g, a), _member_terms(g, b)
    na = math.sqrt(_bilinear(g, ta, ta))
    nb = math.sqrt(_bilinear(g, tb, tb))
    return _bilinear(g, ta, tb) / (na * nb)


def _relation(x: SimpleLabel, y: SimpleLabel) -> str:
    if x == y:
        return "leaf"
    if x.main == y.main:
        return "main"
    return ""


def b1_case(g: TaxonomyGraph, h_i, h_j) -> str:
    """Case id of a leaf pair in the inner-product invariance table.

    Ids are the keys of :data:`B1_CASE_VALUES`; pairs that fall outside the
    enumerated patterns get :data:`OTHER_CASE`.
    """
    a, b = g.leaf(h_i), g.leaf(h_j)
    if a == b:
        return "self"
    am, bm = isinstance(a, Mixture), isinstance(b, Mixture)
    if not am and not bm:
        return "2" if a.main == b.main else "1"
    if am and bm:
        rel = {
            (i, j): _relation(x, y)
            for i, x in enumerate((a.first, a.second))
            for j, y in enumerate((b.first, b.second))
        }
        nonempty = {k: v for k, v in rel.items() if v}
        if not nonempty:
            return "1"
        pattern = tuple(sorted(nonempty.items()))
        return _MIXTURE_PATTERNS.get(pattern, OTHER_CASE)
    mix, simple = (a, b) if am else (b, a)
    if simple == mix.first:
        return "3.1-first"
    if simple == mix.second:
        return "3.1-second"
    if simple.main == mix.first.main:
        return "3.2-first"
    if simple.main == mix.second.main:
        return "3.2-second"
    return "1"


# (position in first mixture, position in second mixture) -> relation
_MIXTURE_PATTERNS = {
    (((1, 1), "leaf"),): "4.1.1",
    (((0, 0), "leaf"),): "4.1.2",
    (((0, 1), "leaf"),): "4.1.3",
    (((1, 0), "leaf"),): "4.1.3",
    (((0, 0), "main"),): "4.2.1",
    (((0, 0), "main"), ((1, 1), "main")): "4.2.2",
    (((0, 1), "main"),): "4.2.3",
    (((1, 0), "main"),): "4.2.3",
    (((0, 1), "main"), ((1, 0), "main")): "4.2.4",
    (((1, 1), "main"),): "4.2.5",
}


# -- taxonomy config file -------------------------------------------------
def taxonomy_from_dict(data: dict) -> TaxonomyGraph:
    if not isinstance(data, dict):
        raise ConfigError("taxonomy file must hold a JSON object")
    schema = data.get("schema", SCHEMA)
    if schema != SCHEMA:
        raise ConfigError(f"unsupported taxonomy schema {schema!r} (expected {SCHEMA!r})")
    if "labels" not in data:
        raise ConfigError("taxonomy file lacks a 'labels' list")
    labels = list(data["labels"]) + list(data.get("mixtures", []))
    rules = data.get("modifier_rules")
    return build_taxonomy(
        labels,
        alphabet=data.get("alphabet"),
        rules=ModifierRules.from_dict(rules) if rules else None,
        leaf_order=data.get("leaf_order", "sorted"),
    )


def taxonomy_to_dict(g: TaxonomyGraph) -> dict:
    out = {
        "schema": SCHEMA,
        "alphabet": list(g.alphabet),
        "labels": [render_label(h) for h in g.non_mixture],
        "mixtures": [render_label(h) for h in g.mixtures],
        "leaf_order": g.leaf_order,
    }
    if g.rules is not None:
        out["modifier_rules"] = g.rules.to_dict()
    return out


def load_taxonomy(path) -> TaxonomyGraph:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read taxonomy file {path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"taxonomy file {path} is not valid JSON: {exc}") from exc
    return taxonomy_from_dict(data)


def default_taxonomy_path() -> Path:
    return Path(__file__).with_name("data") / "default_taxonomy.json"


def example_taxonomy_path() -> Path:
    return Path(__file__).with_name("data") / "example_taxonomy.json"


def load_default_taxonomy() -> TaxonomyGraph:
    return load_taxonomy(default_taxonomy_path())


def similarity_matrix(g: TaxonomyGraph) -> "np.ndarray":
    """``lca_similarity`` over all non-mixture leaves, in leaf order."""
    import numpy as np

    simple = g.non_mixture
    d = len(simple)
    out = np.eye(d)
    for i in range(d):
        for j in range(i):
            out[i, j] = out[j, i] = lca_similarity(g, simple[i], simple[j])
    return out


def required_similarity_matrix(g: TaxonomyGraph) -> "np.ndarray":
    """``required_similarity`` for every leaf pair, as an ``N x N`` array.

    Same closed form as the scalar version, evaluated as ``Wᵀ S W`` with
    ``W`` the member-weight matrix and ``S`` the LCA similarity matrix.
    """
    import numpy as np

    simple = g.non_mixture
    pos = {render_label(h): i for i, h in enumerate(simple)}
    w = np.zeros((len(simple), len(g.leaves)))
    for col, h in enumerate(g.leaves):
        for weight, member in _member_terms(g, h):
            w[pos[render_label(member)], col] += weight
    gram = w.T @ similarity_matrix(g) @ w
    norms = np.sqrt(np.diag(gram))
    return gram / np.outer(norms, norms)
