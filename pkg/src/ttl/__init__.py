"""Taxonomic trace links: classify artifacts against a domain taxonomy and
derive, evaluate, and vet trace-link candidates from label overlap."""

from ttl.classifier import (
    ArtifactKind,
    ArtifactRecord,
    Classification,
    ClassifierConfig,
    classify_artifact,
    classify_corpus,
    eligible_nodes,
)
from ttl.embedding import EmbeddingCache, ProviderConfig, cosine, embed_texts, normalize_text
from ttl.evaluation import (
    CandidateStats,
    GroundTruth,
    MetricsPoint,
    SweepCurve,
    candidate_stats,
    compute_metrics,
    reduction_ratio,
    select_config,
    sweep_evaluate,
)
from ttl.taxonomy import (
    Taxonomy,
    TaxonomyNode,
    TaxonomyStats,
    ancestors,
    class_text,
    compute_stats,
    load_taxonomy,
    parse_taxonomy,
    save_taxonomy,
    validate_taxonomy,
)
from ttl.tracelinks import (
    LinkConfig,
    TraceLinkCandidate,
    derive_links,
    match_labels,
    sweep_candidates,
)

__version__ = "0.1.0"

__all__ = [
    "ArtifactKind",
    "ArtifactRecord",
    "CandidateStats",
    "Classification",
    "ClassifierConfig",
    "EmbeddingCache",
    "GroundTruth",
    "LinkConfig",
    "MetricsPoint",
    "ProviderConfig",
    "SweepCurve",
    "Taxonomy",
    "TaxonomyNode",
    "TaxonomyStats",
    "TraceLinkCandidate",
    "ancestors",
    "candidate_stats",
    "class_text",
    "classify_artifact",
    "classify_corpus",
    "compute_metrics",
    "compute_stats",
    "cosine",
    "derive_links",
    "eligible_nodes",
    "embed_texts",
    "load_taxonomy",
    "match_labels",
    "normalize_text",
    "parse_taxonomy",
    "reduction_ratio",
    "save_taxonomy",
    "select_config",
    "sweep_candidates",
    "sweep_evaluate",
    "validate_taxonomy",
]
