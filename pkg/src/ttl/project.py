"""Versioned on-disk workspace for a trace-link project.

Layout under the project directory:

    manifest.json                      project name + active configuration
    taxonomy.csv                       the taxonomy in the flat CSV format
    corpora/<role>.jsonl               one artifact per line (source/target)
    classifications/<fp>-<role>.csv    classification dumps per fingerprint
    candidates/<fp>-lc<k>.csv          candidate dumps per fingerprint/LC
    decisions.log                      append-only checksummed JSON lines
    ground_truth.csv                   optional source_id,target_id pairs
    exports/accepted.csv               accepted links export

Everything is plain text for diff-ability. The decision log is append-only;
a torn final entry is detected by its checksum and ignored on load.
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass, field
from datetime import datetime, timezone

from ttl.classifier import (
    ArtifactRecord,
    Classification,
    read_classifications_csv,
    read_corpus_jsonl,
    write_classifications_csv,
    write_corpus_jsonl,
)
from ttl.errors import DataError
from ttl.evaluation import GroundTruth, read_ground_truth_csv
from ttl.taxonomy import Taxonomy, load_taxonomy, save_taxonomy
from ttl.tracelinks import (
    TraceLinkCandidate,
    canonical_pair,
    read_candidates_csv,
    write_candidates_csv,
)


class PathNotEmptyError(DataError):
    """init_project target already contains files."""


class UnknownCandidateError(DataError):
    """A decision referenced a pair that is not a current candidate."""


VERDICTS = ("accepted", "rejected")


@dataclass(frozen=True)
class VetDecision:
    """One human verdict on a candidate pair (pair stored canonically)."""

    source_id: str
    target_id: str
    verdict: str
    actor: str
    timestamp: str
    note: str | None = None

    def __post_init__(self) -> None:
        if self.verdict not in VERDICTS:
            raise DataError(f"verdict must be one of {VERDICTS}, got {self.verdict!r}")
        a, b = canonical_pair(self.source_id, self.target_id)
        object.__setattr__(self, "source_id", a)
        object.__setattr__(self, "target_id", b)

    @property
    def pair(self) -> tuple[str, str]:
        return (self.source_id, self.target_id)


@dataclass
class Project:
    """A loaded workspace handle; file contents are read lazily."""

    path: str
    name: str
    active: dict = field(default_factory=dict)

    # --- paths ---------------------------------------------------------------

    def _p(self, *parts: str) -> str:
        return os.path.join(self.path, *parts)

    @property
    def manifest_path(self) -> str:
        return self._p("manifest.json")

    @property
    def decisions_path(self) -> str:
        return self._p("decisions.log")

    # --- content accessors -----------------------------------------------------

    def taxonomy(self) -> Taxonomy:
        return load_taxonomy(self._p("taxonomy.csv"))

    def save_taxonomy(self, t: Taxonomy) -> None:
        save_taxonomy(t, self._p("taxonomy.csv"))

    def corpus(self, role: str) -> list[ArtifactRecord]:
        path = self._p("corpora", f"{role}.jsonl")
        if not os.path.exists(path):
            return []
        with open(path, encoding="utf-8") as fh:
            return read_corpus_jsonl(fh.read())

    def save_corpus(self, role: str, corpus: list[ArtifactRecord]) -> None:
        with open(self._p("corpora", f"{role}.jsonl"), "w", encoding="utf-8") as fh:
            fh.write(write_corpus_jsonl(corpus))

    def classifications(self, fingerprint: str, role: str) -> list[Classification]:
        path = self._p("classifications", f"{fingerprint}-{role}.csv")
        if not os.path.exists(path):
            return []
        with open(path, encoding="utf-8") as fh:
            return read_classifications_csv(fh.read())

    def save_classifications(
        self, fingerprint: str, role: str, classifications: list[Classification]
    ) -> None:
        path = self._p("classifications", f"{fingerprint}-{role}.csv")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(write_classifications_csv(classifications))

    def candidates(self, fingerprint: str, lc: int) -> list[TraceLinkCandidate]:
        path = self._p("candidates", f"{fingerprint}-lc{lc}.csv")
        if not os.path.exists(path):
            return []
        with open(path, encoding="utf-8") as fh:
            return read_candidates_csv(fh.read())

    def save_candidates(
        self, fingerprint: str, lc: int, candidates: list[TraceLinkCandidate]
    ) -> None:
        path = self._p("candidates", f"{fingerprint}-lc{lc}.csv")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(write_candidates_csv(candidates))

    def current_candidates(self) -> list[TraceLinkCandidate]:
        fp = self.active.get("fingerprint")
        lc = self.active.get("lc")
        if not fp or not lc:
            return []
        return self.candidates(fp, int(lc))

    def ground_truth(self) -> GroundTruth | None:
        path = self._p("ground_truth.csv")
        if not os.path.exists(path):
            return None
        with open(path, encoding="utf-8") as fh:
            return read_ground_truth_csv(fh.read())

    def set_active(self, **kwargs) -> None:
        self.active.update(kwargs)
        self._write_manifest()

    def _write_manifest(self) -> None:
        with open(self.manifest_path, "w", encoding="utf-8") as fh:
            json.dump(
                {"name": self.name, "active": self.active}, fh, indent=2,
                sort_keys=True,
            )
            fh.write("\n")


def init_project(path: str, name: str) -> Project:
    """Create a skeleton workspace; the target must be empty or absent."""
    if os.path.exists(path) and os.listdir(path):
        raise PathNotEmptyError(f"{path!r} exists and is not empty")
    for sub in ("corpora", "classifications", "candidates", "exports"):
        os.makedirs(os.path.join(path, sub), exist_ok=True)
    project = Project(path=path, name=name)
    project._write_manifest()
    open(project.decisions_path, "a", encoding="utf-8").close()
    return project


def load_project(path: str) -> Project:
    manifest = os.path.join(path, "manifest.json")
    if not os.path.exists(manifest):
        raise DataError(f"{path!r} is not a project workspace (no manifest.json)")
    with open(manifest, encoding="utf-8") as fh:
        doc = json.load(fh)
    return Project(path=path, name=doc.get("name", ""), active=doc.get("active", {}))


# --- decision log --------------------------------------------------------------


def _entry_line(decision: VetDecision) -> str:
    payload = json.dumps(
        {
            "source_id": decision.source_id,
            "target_id": decision.target_id,
            "verdict": decision.verdict,
            "actor": decision.actor,
            "timestamp": decision.timestamp,
            "note": decision.note,
        },
        sort_keys=True,
        ensure_ascii=False,
    )
    digest = hashlib.sha256(payload.encode("utf-8")).hexdigest()[:16]
    return f"{payload}\t{digest}\n"


def read_decision_log(path: str) -> list[VetDecision]:
    """Parse the log, skipping entries whose checksum does not verify."""
    if not os.path.exists(path):
        return []
    decisions: list[VetDecision] = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line or "\t" not in line:
                continue
            payload, digest = line.rsplit("\t", 1)
            if hashlib.sha256(payload.encode("utf-8")).hexdigest()[:16] != digest:
                continue
            try:
                obj = json.loads(payload)
                decisions.append(
                    VetDecision(
                        source_id=obj["source_id"],
                        target_id=obj["target_id"],
                        verdict=obj["verdict"],
                        actor=obj.get("actor", ""),
                        timestamp=obj.get("timestamp", ""),
                        note=obj.get("note"),
                    )
                )
            except (json.JSONDecodeError, KeyError, DataError):
                continue
    return decisions


def record_decision(
    project: Project, decision: VetDecision, require_candidate: bool = True
) -> list[VetDecision]:
    """Append one decision and return the full log.

    The pair must be among the current candidates (pairs are how human work
    survives reclassification: a re-derived candidate for the same pair keeps
    its verdict).
    """
    if require_candidate:
        current = {c.pair for c in project.current_candidates()}
        if decision.pair not in current:
            raise UnknownCandidateError(
                f"pair {decision.pair} is not a current candidate"
            )
    with open(project.decisions_path, "a", encoding="utf-8") as fh:
        fh.write(_entry_line(decision))
    return read_decision_log(project.decisions_path)


def live_verdicts(decisions: list[VetDecision]) -> dict[tuple[str, str], VetDecision]:
    """Latest verdict per pair (later entries supersede earlier ones)."""
    live: dict[tuple[str, str], VetDecision] = {}
    for d in decisions:
        live[d.pair] = d
    return live


def decision_status(
    project: Project,
) -> dict[tuple[str, str], dict]:
    """Live verdict per pair plus a ``stale`` flag for non-current pairs."""
    decisions = read_decision_log(project.decisions_path)
    current = {c.pair for c in project.current_candidates()}
    return {
        pair: {"verdict": d.verdict, "stale": pair not in current, "decision": d}
        for pair, d in live_verdicts(decisions).items()
    }


def candidate_status(
    project: Project, candidates: list[TraceLinkCandidate]
) -> list[TraceLinkCandidate]:
    """Candidates with status replaced by their live verdict where decided."""
    live = live_verdicts(read_decision_log(project.decisions_path))
    out = []
    for c in candidates:
        d = live.get(c.pair)
        status = d.verdict if d else "candidate"
        out.append(
            TraceLinkCandidate(
                source_id=c.source_id,
                target_id=c.target_id,
                matched_labels=c.matched_labels,
                match_count=c.match_count,
                status=status,
            )
        )
    return out


def export_accepted(project: Project) -> str:
    """Write exports/accepted.csv with exactly the live-accepted pairs."""
    candidates = {c.pair: c for c in project.current_candidates()}
    live = live_verdicts(read_decision_log(project.decisions_path))
    accepted = []
    for pair in sorted(live):
        if live[pair].verdict != "accepted":
            continue
        c = candidates.get(pair)
        accepted.append(
            TraceLinkCandidate(
                source_id=pair[0],
                target_id=pair[1],
                matched_labels=c.matched_labels if c else frozenset(),
                match_count=c.match_count if c else 0,
                status="accepted",
            )
        )
    text = write_candidates_csv(accepted)
    out_path = os.path.join(project.path, "exports", "accepted.csv")
    os.makedirs(os.path.dirname(out_path), exist_ok=True)
    with open(out_path, "w", encoding="utf-8") as fh:
        fh.write(text)
    return text


def utc_now() -> str:
    return datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%S.%fZ")
