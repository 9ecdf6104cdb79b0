"""Command-line entry point for every pipeline stage.

Subcommands: ``taxonomy validate|stats``, ``classify``, ``link``, ``eval``,
``taxgen``, ``serve``. Data goes to stdout or ``--out`` files; diagnostics go
to stderr. Exit codes: 0 success, 1 validation/data error, 2 usage error,
3 provider/transport error. A ``ttl.toml`` config file may pre-set provider
endpoint, model_id, K and LC; explicit flags always win.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

try:
    import tomllib  # Python >= 3.11
except ModuleNotFoundError:  # pragma: no cover
    import tomli as tomllib

from ttl.classifier import (
    ClassifierConfig,
    CorpusClassifier,
    read_classifications_csv,
    read_corpus_jsonl,
    write_classifications_csv,
)
from ttl.embedding import EmbeddingCache, EmbeddingService, ProviderConfig
from ttl.errors import DataError, TransportError, TTLError
from ttl.evaluation import (
    compute_metrics,
    curve_from_candidates,
    read_ground_truth_csv,
    select_config,
    write_curve_csv,
)
from ttl.taxgen import (
    HttpChatClient,
    ReplayChatClient,
    StrategySpec,
    generate_taxonomy,
    save_transcript,
    write_dedup_report,
)
from ttl.taxonomy import compute_stats, load_taxonomy, save_taxonomy, validate_taxonomy
from ttl.tracelinks import LinkConfig, derive_links, read_candidates_csv, write_candidates_csv

EXIT_OK = 0
EXIT_DATA = 1
EXIT_USAGE = 2
EXIT_TRANSPORT = 3


def load_config(path: str | None) -> dict:
    candidate = path or "ttl.toml"
    if not os.path.exists(candidate):
        if path:
            raise DataError(f"config file not found: {path}")
        return {}
    with open(candidate, "rb") as fh:
        return tomllib.load(fh)


def provider_from_args(args, config: dict) -> ProviderConfig:
    return ProviderConfig(
        provider_id=args.provider or config.get("provider", "deterministic-hash"),
        model_id=args.model or config.get("model_id", "char3gram-v1"),
        dim=args.dim or int(config.get("dim", 256)),
        endpoint=args.endpoint or config.get("endpoint"),
        max_inflight=max(1, args.jobs),
    )


def write_out(text: str, out: str | None) -> None:
    if out and out != "-":
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_taxonomy(args, config: dict) -> int:
    taxonomy = load_taxonomy(args.file, allow_forest=args.allow_forest)
    if args.action == "validate":
        violations = validate_taxonomy(taxonomy)
        errors = [v for v in violations if v.severity == "error"]
        for v in violations:
            print(f"{v.severity}: {v.code}: {v.message}", file=sys.stderr)
        if errors:
            return EXIT_DATA
        print(f"valid: {len(taxonomy.nodes)} nodes")
        return EXIT_OK
    stats = compute_stats(taxonomy)
    print(
        f"n={stats.node_count}, l={stats.leaf_count}, "
        f"c={stats.category_count}, d={stats.depth}"
    )
    return EXIT_OK


def cmd_classify(args, config: dict) -> int:
    taxonomy = load_taxonomy(args.taxonomy, allow_forest=True)
    with open(args.corpus, encoding="utf-8") as fh:
        corpus = read_corpus_jsonl(fh.read())
    provider = provider_from_args(args, config)
    cfg = ClassifierConfig(
        provider=provider,
        k=args.k or int(config.get("k", 10)),
        class_text_mode=args.mode,
        eligibility=args.eligibility,
    )
    service = None
    if args.cache_dir:
        service = EmbeddingService(provider, cache=EmbeddingCache(args.cache_dir))
    classifier = CorpusClassifier(taxonomy, cfg, service=service)
    results = classifier.classify_corpus(corpus)
    write_out(write_classifications_csv(results), args.out)
    print(
        f"classified {len(results)} artifacts x {len(classifier.node_ids)} classes "
        f"(fingerprint {classifier.fingerprint})",
        file=sys.stderr,
    )
    return EXIT_OK


def cmd_link(args, config: dict) -> int:
    with open(args.sources, encoding="utf-8") as fh:
        src = read_classifications_csv(fh.read())
    if args.same_corpus:
        tgt = src if not args.targets else _read_classifications(args.targets)
    else:
        if not args.targets:
            raise DataError("--targets is required unless --same-corpus is set")
        tgt = _read_classifications(args.targets)
    cfg = LinkConfig(
        lc=args.lc or int(config.get("lc", 1)),
        match_mode=args.match_mode,
        same_corpus=args.same_corpus,
    )
    taxonomy = load_taxonomy(args.taxonomy, allow_forest=True) if args.taxonomy else None
    candidates = derive_links(src, tgt, cfg, taxonomy=taxonomy)
    write_out(write_candidates_csv(candidates), args.out)
    print(f"derived {len(candidates)} candidates at LC={cfg.lc}", file=sys.stderr)
    return EXIT_OK


def _read_classifications(path: str):
    with open(path, encoding="utf-8") as fh:
        return read_classifications_csv(fh.read())


def cmd_eval(args, config: dict) -> int:
    with open(args.candidates, encoding="utf-8") as fh:
        candidates = read_candidates_csv(fh.read())
    with open(args.ground_truth, encoding="utf-8") as fh:
        gt = read_ground_truth_csv(fh.read())
    if args.sweep:
        lo, hi = (int(x) for x in args.sweep.split("..", 1))
        curve = curve_from_candidates(
            candidates, gt, range(lo, hi + 1),
            model_id=args.model_id, k=args.k or int(config.get("k", 0)),
        )
        if args.out:
            write_out(write_curve_csv(curve), args.out)
        else:
            sys.stdout.write(write_curve_csv(curve))
        if args.select:
            selected = _select(curve, args.select)
            print(f"selected model={selected[0]} k={selected[1]} lc={selected[2]}")
    else:
        point = compute_metrics(candidates, gt)
        print(
            f"tp={point.true_positives} fp={point.false_positives} "
            f"fn={point.false_negatives} precision={point.precision:.6f} "
            f"recall={point.recall:.6f} f1={point.f1:.6f}"
        )
    return EXIT_OK


def _select(curve, spec: str):
    if spec == "max_f1":
        return select_config([curve], objective="max_f1")
    if spec.startswith("recall_floor="):
        floor = float(spec.split("=", 1)[1])
        return select_config([curve], objective="recall_floor", recall_floor=floor)
    raise DataError(f"unknown --select objective: {spec!r}")


def cmd_taxgen(args, config: dict) -> int:
    corpus_docs: list[str] = []
    if args.corpus:
        for name in sorted(os.listdir(args.corpus)):
            path = os.path.join(args.corpus, name)
            if os.path.isfile(path) and name.lower().endswith((".txt", ".md")):
                with open(path, encoding="utf-8") as fh:
                    corpus_docs.append(fh.read())
    spec = StrategySpec(
        kind=args.strategy,
        corpus=tuple(corpus_docs),
        data_source=args.data_source or ("corpus" if corpus_docs else "none"),
        max_rounds=args.max_rounds,
        breakdown_depth=args.depth,
    )
    if args.client.startswith("replay:"):
        client = ReplayChatClient.from_file(args.client.split(":", 1)[1])
    else:
        client = HttpChatClient(args.client, model_id=args.model or
                                config.get("model_id", "default"))
    name = args.name or os.path.splitext(os.path.basename(args.out))[0]
    taxonomy, run, removals = generate_taxonomy(
        spec, client, name=name, dedupe_policy=args.dedupe
    )
    save_taxonomy(taxonomy, args.out)
    save_transcript(run.transcript, args.out + ".transcript.json")
    with open(args.out + ".dedup.csv", "w", encoding="utf-8") as fh:
        fh.write(write_dedup_report(removals))
    stats = compute_stats(taxonomy)
    print(
        f"generated {stats.node_count} nodes "
        f"({len(removals)} duplicates removed) via {args.strategy} "
        f"in {run.rounds} rounds",
        file=sys.stderr,
    )
    return EXIT_OK


def cmd_serve(args, config: dict) -> int:
    import uvicorn

    from ttl.service import create_app

    app = create_app(args.project, static_dir=args.static)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ttl",
        description="Taxonomic trace links: classify, link, evaluate, vet.",
    )
    parser.add_argument("--config", help="path to a ttl.toml config file")
    parser.add_argument("--jobs", type=int, default=1,
                        help="max concurrent remote requests")
    sub = parser.add_subparsers(dest="command", required=True)

    p_tax = sub.add_parser("taxonomy", help="validate a taxonomy or print stats")
    p_tax.add_argument("action", choices=["validate", "stats"])
    p_tax.add_argument("file")
    p_tax.add_argument("--allow-forest", action="store_true",
                       help="synthesize a root when several top-level nodes exist")
    p_tax.set_defaults(func=cmd_taxonomy)

    p_cls = sub.add_parser("classify", help="rank taxonomy labels per artifact")
    p_cls.add_argument("--taxonomy", required=True)
    p_cls.add_argument("--corpus", required=True, help="artifact JSONL file")
    p_cls.add_argument("--k", type=int)
    p_cls.add_argument("--provider", choices=["deterministic-hash", "remote"])
    p_cls.add_argument("--model")
    p_cls.add_argument("--dim", type=int)
    p_cls.add_argument("--endpoint")
    p_cls.add_argument("--mode", default="rich",
                       choices=["title", "rich", "path"])
    p_cls.add_argument("--eligibility", default="exclude_root",
                       choices=["all", "leaves_only", "exclude_root"])
    p_cls.add_argument("--cache-dir")
    p_cls.add_argument("--out", required=True)
    p_cls.set_defaults(func=cmd_classify)

    p_lnk = sub.add_parser("link", help="derive trace-link candidates")
    p_lnk.add_argument("--sources", required=True, help="classification CSV")
    p_lnk.add_argument("--targets", help="classification CSV")
    p_lnk.add_argument("--lc", type=int)
    p_lnk.add_argument("--same-corpus", action="store_true")
    p_lnk.add_argument("--match-mode", default="exact",
                       choices=["exact", "ancestor_rollup"])
    p_lnk.add_argument("--taxonomy", help="needed for ancestor_rollup")
    p_lnk.add_argument("--out", required=True)
    p_lnk.set_defaults(func=cmd_link)

    p_evl = sub.add_parser("eval", help="score candidates against ground truth")
    p_evl.add_argument("--candidates", required=True)
    p_evl.add_argument("--ground-truth", required=True)
    p_evl.add_argument("--sweep", help="inclusive LC range, e.g. 1..15 "
                       "(requires a dump derived at LC <= range start)")
    p_evl.add_argument("--select", help="max_f1 or recall_floor=<float>")
    p_evl.add_argument("--model-id", default="")
    p_evl.add_argument("--k", type=int)
    p_evl.add_argument("--out")
    p_evl.set_defaults(func=cmd_eval)

    p_gen = sub.add_parser("taxgen", help="generate a taxonomy via chat prompting")
    p_gen.add_argument("--strategy", required=True,
                       choices=["all_at_once", "bottom_up", "level_branch"])
    p_gen.add_argument("--client", required=True,
                       help="chat endpoint URL or replay:FILE")
    p_gen.add_argument("--corpus", help="directory of .txt/.md context documents")
    p_gen.add_argument("--out", required=True)
    p_gen.add_argument("--name")
    p_gen.add_argument("--data-source")
    p_gen.add_argument("--model")
    p_gen.add_argument("--max-rounds", type=int, default=20)
    p_gen.add_argument("--depth", type=int, default=3)
    p_gen.add_argument("--dedupe", default="global_title",
                       choices=["within_branch", "global_title"])
    p_gen.set_defaults(func=cmd_taxgen)

    p_srv = sub.add_parser("serve", help="serve the vetting API and UI")
    p_srv.add_argument("--project", required=True)
    p_srv.add_argument("--port", type=int, default=8734)
    p_srv.add_argument("--host", default="127.0.0.1")
    p_srv.add_argument("--static", help="directory of UI assets to serve at /")
    p_srv.set_defaults(func=cmd_serve)
    return parser


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = load_config(args.config)
        return args.func(args, config)
    except TransportError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_TRANSPORT
    except TTLError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


def main(argv: list[str] | None = None) -> int:
    return run(argv)


if __name__ == "__main__":
    sys.exit(main())
