"""Scoring candidate links against ground truth; sweep curves and selection.

Ground truth is treated as the complete positive set (closed world): every
candidate outside it is a false positive. Precision at zero candidates is
defined as 0 so curves stay plottable across empty tails.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Mapping

from ttl.classifier import ArtifactRecord, Classification
from ttl.errors import DataError
from ttl.tracelinks import (
    LinkConfig,
    TraceLinkCandidate,
    canonical_pair,
    sweep_candidates,
)

Pair = tuple[str, str]


class EmptyGroundTruthError(DataError):
    """Metrics are undefined against an empty ground truth."""


class NoFeasiblePointError(DataError):
    """No sweep point satisfies the selection constraint."""


@dataclass(frozen=True)
class GroundTruth:
    """Known-correct unordered pairs, at artifact or document granularity."""

    pairs: frozenset[Pair]
    granularity: str = "artifact"
    provenance: str = ""

    def __post_init__(self) -> None:
        if self.granularity not in ("artifact", "document"):
            raise DataError(f"unknown granularity: {self.granularity!r}")
        canon = frozenset(canonical_pair(a, b) for a, b in self.pairs)
        for a, b in canon:
            if a == b:
                raise DataError(f"ground truth contains self-pair {a!r}")
        object.__setattr__(self, "pairs", canon)


@dataclass(frozen=True)
class MetricsPoint:
    """Precision/recall/F1 and raw counts at one LC value."""

    lc: int
    true_positives: int
    false_positives: int
    false_negatives: int
    precision: float
    recall: float
    f1: float
    candidate_count: int

    @classmethod
    def from_counts(cls, lc: int, tp: int, fp: int, fn: int) -> MetricsPoint:
        precision = tp / (tp + fp) if tp + fp else 0.0
        recall = tp / (tp + fn) if tp + fn else 0.0
        f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
        return cls(
            lc=lc,
            true_positives=tp,
            false_positives=fp,
            false_negatives=fn,
            precision=precision,
            recall=recall,
            f1=f1,
            candidate_count=tp + fp,
        )


@dataclass(frozen=True)
class SweepCurve:
    """MetricsPoints over an LC sweep for one model/K configuration."""

    model_id: str
    k: int
    points: tuple[MetricsPoint, ...]

    def __post_init__(self) -> None:
        lcs = [p.lc for p in self.points]
        if any(b <= a for a, b in zip(lcs, lcs[1:])):
            raise DataError("curve LC values must be strictly increasing")
        recalls = [p.recall for p in self.points]
        if any(b > a + 1e-12 for a, b in zip(recalls, recalls[1:])):
            raise DataError("recall must be non-increasing along the curve")


@dataclass(frozen=True)
class CandidateStats:
    """Per-source candidate-count distribution (population sd)."""

    mean: float
    sd: float
    possible_links: int
    per_source: tuple[int, ...]


def candidate_pairs(
    candidates: list[TraceLinkCandidate],
    projection: Mapping[str, str] | None = None,
) -> frozenset[Pair]:
    """Canonical deduped pair set, optionally projected to document ids."""
    pairs = set()
    for c in candidates:
        a, b = c.source_id, c.target_id
        if projection is not None:
            a, b = projection.get(a, a), projection.get(b, b)
        if a == b:
            continue
        pairs.add(canonical_pair(a, b))
    return frozenset(pairs)


def compute_metrics(
    candidates: list[TraceLinkCandidate],
    gt: GroundTruth,
    lc: int = 0,
    projection: Mapping[str, str] | None = None,
) -> MetricsPoint:
    """TP/FP/FN against the ground truth; order- and duplicate-invariant.

    At document granularity, artifact ids are projected through ``projection``
    before matching and candidates are deduplicated at the projected level.
    """
    if not gt.pairs:
        raise EmptyGroundTruthError("ground truth has no pairs")
    if gt.granularity == "document" and projection is None:
        raise DataError("document-granularity ground truth requires a projection")
    pairs = candidate_pairs(
        candidates, projection if gt.granularity == "document" else None
    )
    tp = len(pairs & gt.pairs)
    return MetricsPoint.from_counts(
        lc=lc, tp=tp, fp=len(pairs) - tp, fn=len(gt.pairs) - tp
    )


def sweep_evaluate(
    src: list[Classification],
    tgt: list[Classification],
    gt: GroundTruth,
    lc_range: range,
    cfg: LinkConfig | None = None,
    model_id: str = "",
    k: int = 0,
    projection: Mapping[str, str] | None = None,
) -> SweepCurve:
    """Derive candidates at every LC and score each set."""
    by_lc = sweep_candidates(src, tgt, lc_range, cfg=cfg)
    points = tuple(
        compute_metrics(by_lc[lc], gt, lc=lc, projection=projection)
        for lc in sorted(by_lc)
    )
    return SweepCurve(model_id=model_id, k=k, points=points)


def curve_from_candidates(
    candidates: list[TraceLinkCandidate],
    gt: GroundTruth,
    lc_range: range,
    model_id: str = "",
    k: int = 0,
    projection: Mapping[str, str] | None = None,
) -> SweepCurve:
    """Sweep by match_count filtering of an existing candidate dump.

    Exact when the dump was derived at LC <= min(lc_range) (monotone
    shrinkage guarantees the filtered sets equal fresh derivations).
    """
    points = []
    for lc in sorted(set(lc_range)):
        subset = [c for c in candidates if c.match_count >= lc]
        points.append(compute_metrics(subset, gt, lc=lc, projection=projection))
    return SweepCurve(model_id=model_id, k=k, points=tuple(points))


def candidate_stats(
    candidates: list[TraceLinkCandidate],
    sources: list[ArtifactRecord],
    possible: int,
) -> CandidateStats:
    """Mean/sd of candidates incident to each source (zero-candidate sources count)."""
    if possible < 1:
        raise DataError("possible links per source must be >= 1")
    counts = {a.id: 0 for a in sources}
    for c in candidates:
        if c.source_id in counts:
            counts[c.source_id] += 1
        if c.target_id in counts:
            counts[c.target_id] += 1
    per_source = tuple(counts[a.id] for a in sources)
    if not per_source:
        return CandidateStats(0.0, 0.0, possible, ())
    mean = sum(per_source) / len(per_source)
    variance = sum((x - mean) ** 2 for x in per_source) / len(per_source)
    return CandidateStats(mean, math.sqrt(variance), possible, per_source)


def reduction_ratio(candidate_count: int, possible_pairs: int) -> float:
    """Fraction of all possible pairs a reviewer no longer has to inspect."""
    if possible_pairs < 1:
        raise DataError("possible_pairs must be >= 1")
    return 1.0 - candidate_count / possible_pairs


def select_config(
    curves: list[SweepCurve],
    objective: str = "max_f1",
    recall_floor: float | None = None,
) -> tuple[str, int, int]:
    """Pick (model_id, K, LC) by objective.

    ``max_f1`` maximizes F1 (ties: smaller LC, then model id). ``recall_floor``
    keeps points with recall >= floor and maximizes precision there (ties:
    smaller LC, then model id); raises NoFeasiblePointError when nothing
    clears the floor.
    """
    if not curves:
        raise DataError("select_config requires at least one curve")
    rows = [
        (curve.model_id, curve.k, p) for curve in curves for p in curve.points
    ]
    if objective == "max_f1":
        best = max(rows, key=lambda r: (r[2].f1, -r[2].lc, _rev(r[0]), -r[1]))
        return (best[0], best[1], best[2].lc)
    if objective == "recall_floor":
        if recall_floor is None:
            raise DataError("recall_floor objective needs a floor value")
        feasible = [r for r in rows if r[2].recall >= recall_floor]
        if not feasible:
            raise NoFeasiblePointError(
                f"no sweep point reaches recall >= {recall_floor}"
            )
        best = max(
            feasible, key=lambda r: (r[2].precision, -r[2].lc, _rev(r[0]), -r[1])
        )
        return (best[0], best[1], best[2].lc)
    raise DataError(f"unknown objective: {objective!r}")


class _rev:
    """Inverts string ordering inside a max() key (smaller id wins ties)."""

    def __init__(self, value: str) -> None:
        self.value = value

    def __lt__(self, other: "_rev") -> bool:
        return self.value > other.value

    def __eq__(self, other: object) -> bool:
        return isinstance(other, _rev) and self.value == other.value


# --- serialization -----------------------------------------------------------

CURVE_HEADER = ["model_id", "k", "lc", "candidates", "tp", "fp", "fn",
                "precision", "recall", "f1"]
CLOSED_WORLD_NOTE = "# metrics assume closed-world ground truth; sd is population sd"


def write_curve_csv(curve: SweepCurve) -> str:
    """One row per LC: ``model_id,k,lc,candidates,tp,fp,fn,precision,recall,f1``."""
    out = io.StringIO()
    out.write(CLOSED_WORLD_NOTE + "\n")
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(CURVE_HEADER)
    for p in curve.points:
        writer.writerow(
            [
                curve.model_id,
                curve.k,
                p.lc,
                p.candidate_count,
                p.true_positives,
                p.false_positives,
                p.false_negatives,
                f"{p.precision:.6f}",
                f"{p.recall:.6f}",
                f"{p.f1:.6f}",
            ]
        )
    return out.getvalue()


def read_ground_truth_csv(text: str, granularity: str = "artifact") -> GroundTruth:
    """Load ``source_id,target_id`` rows (header optional)."""
    pairs = set()
    for row in csv.reader(io.StringIO(text)):
        if not row or row[0].startswith("#"):
            continue
        if [c.strip().lower() for c in row[:2]] == ["source_id", "target_id"]:
            continue
        if len(row) < 2:
            raise DataError(f"ground truth row needs two ids: {row!r}")
        pairs.add((row[0].strip(), row[1].strip()))
    return GroundTruth(pairs=frozenset(pairs), granularity=granularity)


def write_ground_truth_csv(gt: GroundTruth) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["source_id", "target_id"])
    for a, b in sorted(gt.pairs):
        writer.writerow([a, b])
    return out.getvalue()
