"""Label-space toolkit for soil horizon classification.

Horizon-label grammar, the label taxonomy DAG, hierarchical unit-sphere label
embeddings, rare-label clustering, nearest-embedding decoding and the
evaluation metrics.
"""
__version__ = "0.1.0"

from .cluster import ClusterMap, build_cluster_map, levenshtein
from .decode import Prediction, rank_labels, top_k
from .embed import EmbeddingMatrix, embed_taxonomy, mixture_embedding, verify_identities
from .grammar import Mixture, SimpleLabel, main_symbol, parse_label, render_label
from .kernels import BACKEND
from .metrics import (
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
from .simgen import GeneratorConfig, ProfileRecord, average_depth_baseline, generate, stratified_split
from .taxonomy import (
    TaxonomyGraph,
    build_taxonomy,
    lca_similarity,
    load_taxonomy,
    required_similarity,
)
