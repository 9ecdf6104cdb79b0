"""HTTP facade over a project workspace, powering the vetting UI.

JSON over HTTP; scores are serialized at 6 decimal places so exports stay
reproducible. Every error response carries exactly one machine-readable code
(`bad_request`, `not_found`, `conflict`, `provider_unavailable`, `internal`).
Mutating endpoints honor an ``Idempotency-Key`` header: replaying a key
returns the originally computed result. Responses never mention workspace
file paths.
"""

from __future__ import annotations

import threading
from typing import Any

from fastapi import FastAPI, Header, Request
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from ttl.classifier import ClassifierConfig, CorpusClassifier
from ttl.embedding import ProviderConfig, ProviderUnavailableError
from ttl.errors import DataError, TransportError
from ttl.evaluation import curve_from_candidates
from ttl.project import (
    UnknownCandidateError,
    VetDecision,
    candidate_status,
    load_project,
    read_decision_log,
    record_decision,
    utc_now,
)
from ttl.taxonomy import UnknownNodeError, ancestors
from ttl.tracelinks import LinkConfig, derive_links

STATUS_OF_CODE = {
    "bad_request": 400,
    "not_found": 404,
    "conflict": 409,
    "provider_unavailable": 503,
    "internal": 500,
}


class ApiError(Exception):
    def __init__(self, code: str, message: str, detail: Any = None) -> None:
        super().__init__(message)
        self.code = code
        self.message = message
        self.detail = detail


class DecisionBody(BaseModel):
    source_id: str
    target_id: str
    verdict: str
    actor: str = ""
    note: str | None = None


class RunBody(BaseModel):
    k: int = 10
    lc: int = 2
    provider: str = "deterministic-hash"
    model: str = "char3gram-v1"
    dim: int = 256
    endpoint: str | None = None
    same_corpus: bool = False


def _round6(value: float) -> float:
    return float(f"{value:.6f}")


class WorkspaceView:
    """Read-side helpers over a loaded project."""

    def __init__(self, project_path: str) -> None:
        self.path = project_path

    @property
    def project(self):
        return load_project(self.path)

    def score_index(self, project, fingerprint: str) -> dict[tuple[str, str], float]:
        scores: dict[tuple[str, str], float] = {}
        for role in ("source", "target"):
            for c in project.classifications(fingerprint, role):
                for node_id, score in c.ranked_labels:
                    scores[(c.artifact_id, node_id)] = score
        return scores

    def candidate_rows(self, project) -> list[dict]:
        taxonomy = project.taxonomy()
        candidates = candidate_status(project, project.current_candidates())
        fingerprint = project.active.get("fingerprint", "")
        scores = self.score_index(project, fingerprint)
        artifacts = {
            a.id: a for a in project.corpus("source") + project.corpus("target")
        }

        def summary(artifact_id: str) -> dict:
            a = artifacts.get(artifact_id)
            if a is None:
                return {"id": artifact_id, "kind": "other", "title": None,
                        "excerpt": ""}
            return {
                "id": a.id,
                "kind": a.kind.value,
                "title": a.title,
                "excerpt": a.body[:280],
            }

        rows = []
        for c in sorted(
            candidates, key=lambda c: (-c.match_count, c.source_id, c.target_id)
        ):
            matched = []
            for node_id in sorted(c.matched_labels):
                matched.append(
                    {
                        "node_id": node_id,
                        "title": taxonomy.node(node_id).title
                        if taxonomy.has_node(node_id)
                        else node_id,
                        "source_score": _round6(scores.get((c.source_id, node_id), 0.0)),
                        "target_score": _round6(scores.get((c.target_id, node_id), 0.0)),
                    }
                )
            rows.append(
                {
                    "source": summary(c.source_id),
                    "target": summary(c.target_id),
                    "source_id": c.source_id,
                    "target_id": c.target_id,
                    "matched_labels": matched,
                    "match_count": c.match_count,
                    "status": c.status,
                }
            )
        return rows


def create_app(project_path: str, static_dir: str | None = None) -> FastAPI:
    app = FastAPI(title="trace-link vetting service")
    view = WorkspaceView(project_path)
    run_lock = threading.Lock()
    decision_lock = threading.Lock()
    idempotency_store: dict[str, dict] = {}

    @app.exception_handler(ApiError)
    async def api_error_handler(request: Request, exc: ApiError):
        return JSONResponse(
            status_code=STATUS_OF_CODE[exc.code],
            content={"code": exc.code, "message": exc.message, "detail": exc.detail},
        )

    @app.exception_handler(Exception)
    async def unexpected_error_handler(request: Request, exc: Exception):
        return JSONResponse(
            status_code=500,
            content={"code": "internal", "message": "internal error",
                     "detail": exc.__class__.__name__},
        )

    def paginate(items: list, offset: int, limit: int) -> dict:
        if offset < 0 or limit < 1:
            raise ApiError("bad_request", "offset must be >= 0 and limit >= 1")
        return {
            "total": len(items),
            "offset": offset,
            "limit": limit,
            "items": items[offset : offset + limit],
        }

    @app.get("/api/sources")
    def list_sources(offset: int = 0, limit: int = 50):
        project = view.project
        rows = view.candidate_rows(project)
        per_source: dict[str, dict] = {}
        for a in project.corpus("source"):
            per_source[a.id] = {
                "id": a.id,
                "kind": a.kind.value,
                "title": a.title,
                "candidates": 0,
                "decided": 0,
                "cluster": a.metadata.get("cluster"),
            }
        for row in rows:
            for side in (row["source_id"], row["target_id"]):
                if side in per_source:
                    per_source[side]["candidates"] += 1
                    if row["status"] != "candidate":
                        per_source[side]["decided"] += 1
        ordered = [per_source[k] for k in sorted(per_source)]
        return paginate(ordered, offset, limit)

    @app.get("/api/candidates")
    def list_candidates(
        source_id: str | None = None,
        status: str | None = None,
        offset: int = 0,
        limit: int = 50,
    ):
        project = view.project
        rows = view.candidate_rows(project)
        if source_id is not None:
            source_ids = {a.id for a in project.corpus("source")}
            if source_id not in source_ids:
                raise ApiError("not_found", f"unknown source {source_id}")
            rows = [
                r for r in rows
                if source_id in (r["source_id"], r["target_id"])
            ]
        if status is not None:
            if status not in ("candidate", "accepted", "rejected"):
                raise ApiError("bad_request", f"unknown status filter {status}")
            rows = [r for r in rows if r["status"] == status]
        return paginate(rows, offset, limit)

    @app.get("/api/taxonomy/node/{node_id}")
    def taxonomy_node(node_id: str):
        project = view.project
        taxonomy = project.taxonomy()
        try:
            node = taxonomy.node(node_id)
            chain = ancestors(taxonomy, node_id)
        except UnknownNodeError:
            raise ApiError("not_found", f"unknown taxonomy node {node_id}")
        breadcrumb = [
            {"node_id": nid, "title": taxonomy.node(nid).title}
            for nid in chain
        ] + [{"node_id": node.id, "title": node.title}]
        return {
            "node_id": node.id,
            "title": node.title,
            "description": node.description,
            "synonyms": list(node.synonyms),
            "breadcrumb": breadcrumb,
        }

    @app.post("/api/decisions")
    def post_decision(
        body: DecisionBody,
        idempotency_key: str | None = Header(default=None),
    ):
        if idempotency_key and idempotency_key in idempotency_store:
            return idempotency_store[idempotency_key]
        if body.verdict not in ("accepted", "rejected"):
            raise ApiError("bad_request", f"verdict {body.verdict!r} is not allowed")
        project = view.project
        decision = VetDecision(
            source_id=body.source_id,
            target_id=body.target_id,
            verdict=body.verdict,
            actor=body.actor,
            timestamp=utc_now(),
            note=body.note,
        )
        with decision_lock:
            try:
                log = record_decision(project, decision)
            except UnknownCandidateError as exc:
                raise ApiError("not_found", str(exc))
        result = {
            "source_id": decision.source_id,
            "target_id": decision.target_id,
            "status": decision.verdict,
            "log_length": len(log),
        }
        if idempotency_key:
            idempotency_store[idempotency_key] = result
        return result

    @app.post("/api/runs")
    def post_run(
        body: RunBody,
        idempotency_key: str | None = Header(default=None),
    ):
        if idempotency_key and idempotency_key in idempotency_store:
            return idempotency_store[idempotency_key]
        if body.lc < 1:
            raise ApiError("bad_request", "lc must be >= 1")
        if body.k < 1:
            raise ApiError("bad_request", "k must be >= 1")
        if not run_lock.acquire(blocking=False):
            raise ApiError("conflict", "another run is in progress")
        try:
            result = execute_run(view, body)
        except ProviderUnavailableError as exc:
            raise ApiError("provider_unavailable", str(exc))
        except TransportError as exc:
            raise ApiError("provider_unavailable", str(exc))
        except DataError as exc:
            raise ApiError("bad_request", str(exc))
        finally:
            run_lock.release()
        if idempotency_key:
            idempotency_store[idempotency_key] = result
        return result

    @app.get("/api/metrics")
    def get_metrics(lc_from: int = 1, lc_to: int = 15):
        if lc_from > lc_to or lc_from < 1:
            raise ApiError("bad_request", "lc range is inverted or out of bounds")
        project = view.project
        gt = project.ground_truth()
        if gt is None or not gt.pairs:
            raise ApiError("conflict", "no ground truth loaded for this project")
        candidates = project.current_candidates()
        if not candidates:
            raise ApiError("conflict", "no candidates derived yet; run first")
        active = project.active
        curve = curve_from_candidates(
            candidates,
            gt,
            range(lc_from, lc_to + 1),
            model_id=str(active.get("model", "")),
            k=int(active.get("k", 0)),
        )
        return {
            "model_id": curve.model_id,
            "k": curve.k,
            "points": [
                {
                    "lc": p.lc,
                    "candidates": p.candidate_count,
                    "tp": p.true_positives,
                    "fp": p.false_positives,
                    "fn": p.false_negatives,
                    "precision": _round6(p.precision),
                    "recall": _round6(p.recall),
                    "f1": _round6(p.f1),
                }
                for p in curve.points
            ],
        }

    if static_dir:
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")

    return app


def execute_run(view: WorkspaceView, body: RunBody) -> dict:
    from ttl.evaluation import candidate_stats

    project = view.project
    taxonomy = project.taxonomy()
    provider = ProviderConfig(
        provider_id=body.provider,
        model_id=body.model,
        dim=body.dim,
        endpoint=body.endpoint,
    )
    cfg = ClassifierConfig(provider=provider, k=body.k)
    classifier = CorpusClassifier(taxonomy, cfg)
    sources = project.corpus("source")
    targets = project.corpus("target") if not body.same_corpus else sources
    if not sources or not targets:
        raise ApiError("bad_request", "project has no corpora loaded")
    src = classifier.classify_corpus(sources)
    tgt = src if body.same_corpus else classifier.classify_corpus(targets)
    fingerprint = classifier.fingerprint
    link_cfg = LinkConfig(lc=body.lc, same_corpus=body.same_corpus)
    candidates = derive_links(src, tgt, link_cfg)

    project.save_classifications(fingerprint, "source", src)
    if not body.same_corpus:
        project.save_classifications(fingerprint, "target", tgt)
    project.save_candidates(fingerprint, body.lc, candidates)
    project.set_active(
        fingerprint=fingerprint, lc=body.lc, k=body.k, model=body.model,
        provider=body.provider, dim=body.dim, same_corpus=body.same_corpus,
    )
    possible = len(targets) - 1 if body.same_corpus else len(targets)
    stats = candidate_stats(candidates, sources, possible=max(possible, 1))
    return {
        "fingerprint": fingerprint,
        "lc": body.lc,
        "k": body.k,
        "model": body.model,
        "candidate_count": len(candidates),
        "sources": len(sources),
        "targets": len(targets),
        "per_source": {
            "mean": _round6(stats.mean),
            "sd": _round6(stats.sd),
            "possible": stats.possible_links,
        },
    }
