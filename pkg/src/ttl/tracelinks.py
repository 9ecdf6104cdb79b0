"""Trace-link candidate derivation by matched-label counting.

A candidate links two artifacts whose top-K label sets share at least LC
labels. Links are bidirectional, so every pair is stored in canonical
orientation (lexicographically smaller id first) and emitted once per
derivation run.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

from ttl.classifier import Classification
from ttl.errors import DataError
from ttl.taxonomy import NodeId, Taxonomy, ancestors

MAX_SWEEP_LC = 50


class ConfigFingerprintMismatchError(DataError):
    """Classifications from different configs/taxonomies were mixed."""


@dataclass(frozen=True)
class LinkConfig:
    """Minimum shared-label count (LC), match mode, and corpus topology.

    ``ancestor_rollup`` additionally credits the lowest common ancestor of
    cross-set label pairs; it is off by default and excluded from
    label-matching reproduction runs. ``same_corpus`` marks source and target
    as the same artifact set (self-pairs excluded, each unordered pair once).
    """

    lc: int = 1
    match_mode: str = "exact"
    same_corpus: bool = False
    source_kind: str | None = None
    target_kind: str | None = None

    def __post_init__(self) -> None:
        if self.lc < 1:
            raise DataError("LC must be >= 1")
        if self.match_mode not in ("exact", "ancestor_rollup"):
            raise DataError(f"unknown match_mode: {self.match_mode!r}")


@dataclass(frozen=True)
class TraceLinkCandidate:
    """A source/target pair with its matched labels; ids are canonical."""

    source_id: str
    target_id: str
    matched_labels: frozenset[NodeId]
    match_count: int
    status: str = "candidate"

    @property
    def pair(self) -> tuple[str, str]:
        return (self.source_id, self.target_id)


def canonical_pair(a: str, b: str) -> tuple[str, str]:
    return (a, b) if a <= b else (b, a)


def match_labels(
    a: frozenset[NodeId] | set[NodeId],
    b: frozenset[NodeId] | set[NodeId],
    taxonomy: Taxonomy | None = None,
    mode: str = "exact",
) -> frozenset[NodeId]:
    """Labels shared by both sets; rollup mode adds sub-root common ancestors."""
    if mode == "exact":
        return frozenset(a) & frozenset(b)
    if mode != "ancestor_rollup":
        raise DataError(f"unknown match_mode: {mode!r}")
    if taxonomy is None:
        raise DataError("ancestor_rollup requires the taxonomy")
    matched = set(frozenset(a) & frozenset(b))
    root_id = taxonomy.root.id
    paths: dict[NodeId, list[NodeId]] = {}

    def path_of(nid: NodeId) -> list[NodeId]:
        if nid not in paths:
            paths[nid] = ancestors(taxonomy, nid) + [nid]
        return paths[nid]

    for x in a:
        for y in b:
            if x == y:
                continue
            px, py = path_of(x), path_of(y)
            lca: NodeId | None = None
            for u, v in zip(px, py):
                if u != v:
                    break
                lca = u
            if lca is not None and lca != root_id:
                matched.add(lca)
    return frozenset(matched)


def _label_sets(
    classifications: list[Classification],
) -> tuple[dict[str, frozenset[NodeId]], str]:
    fingerprints = {c.fingerprint for c in classifications}
    if len(fingerprints) > 1:
        raise ConfigFingerprintMismatchError(
            f"mixed config fingerprints: {sorted(fingerprints)}"
        )
    return {c.artifact_id: c.label_set() for c in classifications}, (
        next(iter(fingerprints)) if fingerprints else ""
    )


def derive_links(
    src: list[Classification],
    tgt: list[Classification],
    cfg: LinkConfig,
    taxonomy: Taxonomy | None = None,
) -> list[TraceLinkCandidate]:
    """All pairs sharing >= LC labels, sorted by (match_count desc, ids).

    In same-corpus mode the source and target classifications must cover the
    same artifact ids; each unordered pair is considered once and self-pairs
    never. In cross mode every source x target combination is scored and
    coinciding unordered pairs are deduplicated.
    """
    src_labels, fp_src = _label_sets(src)
    tgt_labels, fp_tgt = _label_sets(tgt)
    if fp_src and fp_tgt and fp_src != fp_tgt:
        raise ConfigFingerprintMismatchError(
            f"source fingerprint {fp_src} != target fingerprint {fp_tgt}"
        )
    if cfg.same_corpus:
        if set(src_labels) != set(tgt_labels):
            raise DataError("same_corpus mode requires identical artifact id sets")
        ids = sorted(src_labels)
        pairs = [
            (ids[i], ids[j])
            for i in range(len(ids))
            for j in range(i + 1, len(ids))
        ]
    else:
        pairs = [
            (s, t) for s in src_labels for t in tgt_labels if s != t
        ]

    found: dict[tuple[str, str], TraceLinkCandidate] = {}
    for s, t in pairs:
        matched = match_labels(
            src_labels[s], tgt_labels[t], taxonomy=taxonomy, mode=cfg.match_mode
        )
        if len(matched) < cfg.lc:
            continue
        a, b = canonical_pair(s, t)
        if (a, b) in found:
            continue
        found[(a, b)] = TraceLinkCandidate(
            source_id=a,
            target_id=b,
            matched_labels=matched,
            match_count=len(matched),
        )
    return sorted(
        found.values(), key=lambda c: (-c.match_count, c.source_id, c.target_id)
    )


def sweep_candidates(
    src: list[Classification],
    tgt: list[Classification],
    lc_range: range,
    cfg: LinkConfig | None = None,
    taxonomy: Taxonomy | None = None,
) -> dict[int, list[TraceLinkCandidate]]:
    """Candidates per LC value; pairwise matching is computed once.

    Filtering one LC=1 derivation by match_count is exact because the
    intersection-size threshold is monotone.
    """
    base = cfg or LinkConfig()
    lcs = list(lc_range)
    if not lcs:
        return {}
    if min(lcs) < 1 or max(lcs) > MAX_SWEEP_LC:
        raise DataError(f"lc_range must stay within [1, {MAX_SWEEP_LC}]")
    all_candidates = derive_links(
        src,
        tgt,
        LinkConfig(
            lc=1,
            match_mode=base.match_mode,
            same_corpus=base.same_corpus,
            source_kind=base.source_kind,
            target_kind=base.target_kind,
        ),
        taxonomy=taxonomy,
    )
    return {
        lc: [c for c in all_candidates if c.match_count >= lc] for lc in lc_range
    }


# --- serialization -----------------------------------------------------------

CANDIDATE_HEADER = ["source_id", "target_id", "match_count", "matched_labels", "status"]


def write_candidates_csv(candidates: list[TraceLinkCandidate]) -> str:
    """Dump as ``source_id,target_id,match_count,matched_labels,status`` rows."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(CANDIDATE_HEADER)
    for c in candidates:
        writer.writerow(
            [
                c.source_id,
                c.target_id,
                c.match_count,
                ";".join(sorted(c.matched_labels)),
                c.status,
            ]
        )
    return out.getvalue()


def read_candidates_csv(text: str) -> list[TraceLinkCandidate]:
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or rows[0] != CANDIDATE_HEADER:
        raise DataError("not a candidate dump (bad header)")
    candidates = []
    for row in rows[1:]:
        if not row:
            continue
        source_id, target_id, match_count, matched, status = row
        labels = frozenset(x for x in matched.split(";") if x)
        candidates.append(
            TraceLinkCandidate(
                source_id=source_id,
                target_id=target_id,
                matched_labels=labels,
                match_count=int(match_count),
                status=status,
            )
        )
    return candidates
