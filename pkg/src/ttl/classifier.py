"""Zero-shot multi-label classification of artifacts against a taxonomy.

Each artifact and each eligible taxonomy class is embedded, cosine similarity
is computed between the artifact and every class, and the top-K classes are
kept in a deterministic total order (score descending, then node id
ascending so equal scores never reorder between runs).
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from ttl.embedding import EmbeddingService, ProviderConfig, normalize_text
from ttl.errors import DataError
from ttl.taxonomy import NodeId, Taxonomy, class_text, check_taxonomy


class ArtifactKind(str, Enum):
    REQUIREMENT = "requirement"
    BUC = "buc"
    GPR = "gpr"
    TEST_CASE = "test_case"
    STANDARD_CLAUSE = "standard_clause"
    OTHER = "other"


class EmptyArtifactBodyError(DataError):
    """Artifact body is empty after normalization."""


class DuplicateArtifactIdError(DataError):
    """Two artifacts in one corpus share an id."""


@dataclass(frozen=True)
class ArtifactRecord:
    """One traceable text unit (requirement, use case, test case, clause)."""

    id: str
    kind: ArtifactKind
    body: str
    title: str | None = None
    metadata: dict[str, str] = field(default_factory=dict)

    def embedding_text(self) -> str:
        """Title and body concatenated, then normalized."""
        raw = f"{self.title} {self.body}" if self.title else self.body
        return normalize_text(raw)


@dataclass(frozen=True)
class ClassifierConfig:
    """K labels per artifact, class rendering mode, node eligibility, provider."""

    provider: ProviderConfig = ProviderConfig()
    k: int = 10
    class_text_mode: str = "rich"
    eligibility: str = "exclude_root"

    def __post_init__(self) -> None:
        if self.k < 1:
            raise DataError("K must be >= 1")
        if self.eligibility not in ("all", "leaves_only", "exclude_root"):
            raise DataError(f"unknown eligibility policy: {self.eligibility!r}")

    def fingerprint(self, taxonomy: Taxonomy) -> str:
        """Stable digest over everything that can change classification output."""
        h = hashlib.sha256()
        h.update(
            json.dumps(
                {
                    "k": self.k,
                    "mode": self.class_text_mode,
                    "eligibility": self.eligibility,
                    "provider": self.provider.provider_id,
                    "model": self.provider.model_id,
                    "dim": self.provider.dim,
                },
                sort_keys=True,
            ).encode()
        )
        for n in taxonomy.nodes:
            h.update(
                f"{n.id}\x1f{n.title}\x1f{n.description or ''}\x1f"
                f"{';'.join(n.synonyms)}\x1f{n.parent or ''}\x1e".encode()
            )
        return h.hexdigest()[:16]


@dataclass(frozen=True)
class Classification:
    """Top-K labels with scores for one artifact, highest score first."""

    artifact_id: str
    ranked_labels: tuple[tuple[NodeId, float], ...]
    fingerprint: str

    def label_set(self) -> frozenset[NodeId]:
        return frozenset(node_id for node_id, _ in self.ranked_labels)


def eligible_nodes(t: Taxonomy, policy: str = "exclude_root") -> list[NodeId]:
    """Node ids a classifier may assign, in taxonomy insertion order."""
    check_taxonomy(t)
    if policy == "all":
        return t.node_ids()
    if policy == "exclude_root":
        root_id = t.root.id
        return [nid for nid in t.node_ids() if nid != root_id]
    if policy == "leaves_only":
        return [nid for nid in t.node_ids() if not t.children(nid)]
    raise DataError(f"unknown eligibility policy: {policy!r}")


class CorpusClassifier:
    """Embeds the class texts once and classifies any number of artifacts.

    A single instance guarantees identical scores between per-artifact and
    batch calls: both paths score through the same class matrix/vector
    product.
    """

    def __init__(
        self,
        taxonomy: Taxonomy,
        cfg: ClassifierConfig,
        service: EmbeddingService | None = None,
    ) -> None:
        check_taxonomy(taxonomy)
        self.taxonomy = taxonomy
        self.cfg = cfg
        self.service = service or EmbeddingService(cfg.provider)
        self.fingerprint = cfg.fingerprint(taxonomy)
        # Pre-sort by node id so a stable sort on score alone yields the
        # (score desc, id asc) total order.
        ids = sorted(eligible_nodes(taxonomy, cfg.eligibility))
        if not ids:
            raise DataError("no eligible taxonomy nodes under this policy")
        self.node_ids = ids
        texts = [class_text(taxonomy, nid, cfg.class_text_mode) for nid in ids]
        self.class_matrix = np.stack(self.service.embed_texts(texts))

    def classify(self, artifact: ArtifactRecord) -> Classification:
        text = artifact.embedding_text()
        if not text:
            raise EmptyArtifactBodyError(f"artifact {artifact.id!r} has no text")
        vec = self.service.embed_texts([text])[0]
        return self._rank(artifact.id, vec)

    def classify_corpus(self, corpus: list[ArtifactRecord]) -> list[Classification]:
        seen: set[str] = set()
        for a in corpus:
            if a.id in seen:
                raise DuplicateArtifactIdError(f"duplicate artifact id {a.id!r}")
            seen.add(a.id)
        texts = []
        for a in corpus:
            text = a.embedding_text()
            if not text:
                raise EmptyArtifactBodyError(f"artifact {a.id!r} has no text")
            texts.append(text)
        if not corpus:
            return []
        vectors = self.service.embed_texts(texts)
        return [self._rank(a.id, v) for a, v in zip(corpus, vectors)]

    def _rank(self, artifact_id: str, vec: np.ndarray) -> Classification:
        scores = self.class_matrix @ vec
        k = min(self.cfg.k, len(self.node_ids))
        order = np.argsort(-scores, kind="stable")[:k]
        ranked = tuple((self.node_ids[i], float(scores[i])) for i in order)
        return Classification(
            artifact_id=artifact_id, ranked_labels=ranked, fingerprint=self.fingerprint
        )


def classify_artifact(
    artifact: ArtifactRecord,
    taxonomy: Taxonomy,
    cfg: ClassifierConfig,
    service: EmbeddingService | None = None,
) -> Classification:
    return CorpusClassifier(taxonomy, cfg, service).classify(artifact)


def classify_corpus(
    corpus: list[ArtifactRecord],
    taxonomy: Taxonomy,
    cfg: ClassifierConfig,
    service: EmbeddingService | None = None,
) -> list[Classification]:
    return CorpusClassifier(taxonomy, cfg, service).classify_corpus(corpus)


# --- serialization -----------------------------------------------------------

CLASSIFICATION_HEADER = ["artifact_id", "rank", "node_id", "score"]


def write_classifications_csv(classifications: list[Classification]) -> str:
    """Dump as ``artifact_id,rank,node_id,score`` rows (scores at 6 decimals)."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(CLASSIFICATION_HEADER)
    if classifications:
        writer.writerow(["#fingerprint", classifications[0].fingerprint, "", ""])
    for c in classifications:
        for rank, (node_id, score) in enumerate(c.ranked_labels, start=1):
            writer.writerow([c.artifact_id, rank, node_id, f"{score:.6f}"])
    return out.getvalue()


def read_classifications_csv(text: str) -> list[Classification]:
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or rows[0] != CLASSIFICATION_HEADER:
        raise DataError("not a classification dump (bad header)")
    fingerprint = ""
    grouped: dict[str, list[tuple[int, NodeId, float]]] = {}
    order: list[str] = []
    for row in rows[1:]:
        if not row:
            continue
        if row[0] == "#fingerprint":
            fingerprint = row[1]
            continue
        artifact_id, rank, node_id, score = row
        if artifact_id not in grouped:
            grouped[artifact_id] = []
            order.append(artifact_id)
        grouped[artifact_id].append((int(rank), node_id, float(score)))
    result = []
    for artifact_id in order:
        labels = sorted(grouped[artifact_id])
        result.append(
            Classification(
                artifact_id=artifact_id,
                ranked_labels=tuple((nid, score) for _, nid, score in labels),
                fingerprint=fingerprint,
            )
        )
    return result


def write_corpus_jsonl(corpus: list[ArtifactRecord]) -> str:
    """One artifact per line: id, kind, title, body, metadata."""
    lines = []
    for a in corpus:
        lines.append(
            json.dumps(
                {
                    "id": a.id,
                    "kind": a.kind.value,
                    "title": a.title,
                    "body": a.body,
                    "metadata": a.metadata,
                },
                ensure_ascii=False,
            )
        )
    return "\n".join(lines) + ("\n" if lines else "")


def read_corpus_jsonl(text: str) -> list[ArtifactRecord]:
    corpus: list[ArtifactRecord] = []
    seen: set[str] = set()
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise DataError(f"corpus line {lineno}: invalid JSON ({exc})") from exc
        try:
            record = ArtifactRecord(
                id=str(obj["id"]),
                kind=ArtifactKind(obj.get("kind", "other")),
                body=str(obj["body"]),
                title=obj.get("title"),
                metadata={str(k): str(v) for k, v in (obj.get("metadata") or {}).items()},
            )
        except (KeyError, ValueError) as exc:
            raise DataError(f"corpus line {lineno}: {exc}") from exc
        if record.id in seen:
            raise DuplicateArtifactIdError(
                f"corpus line {lineno}: duplicate artifact id {record.id!r}"
            )
        seen.add(record.id)
        corpus.append(record)
    return corpus
