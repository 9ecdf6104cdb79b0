"""Evaluating candidate quality across an LC sweep and picking a config.

Builds a synthetic source/target corpus with planted ground-truth links,
sweeps the shared-label threshold from 1 to 15, and shows how recall decays
while the candidate count shrinks; then selects the LC that keeps recall
above a floor with the best precision.

Run: python demos/03_sweep_evaluation.py
"""

from ttl.classifier import ClassifierConfig, CorpusClassifier
from ttl.embedding import ProviderConfig
from ttl.evaluation import (
    GroundTruth,
    candidate_stats,
    reduction_ratio,
    select_config,
    sweep_evaluate,
)
from ttl.synthetic import random_corpus, random_taxonomy
from ttl.tracelinks import LinkConfig, derive_links

taxonomy = random_taxonomy(seed=7, n_nodes=120)
sources = random_corpus(seed=8, count=40, prefix="B")
targets = random_corpus(seed=9, count=40, prefix="G")

cfg = ClassifierConfig(provider=ProviderConfig(dim=128), k=10)
classifier = CorpusClassifier(taxonomy, cfg)
src = classifier.classify_corpus(sources)
tgt = classifier.classify_corpus(targets)

gt = GroundTruth(
    pairs=frozenset({(f"B{i:04d}", f"G{i:04d}") for i in range(0, 40, 4)}),
    provenance="planted links, every fourth pair",
)

curve = sweep_evaluate(src, tgt, gt, range(1, 16), model_id=cfg.provider.model_id,
                       k=cfg.k)
print("lc  candidates  precision  recall  f1")
for p in curve.points:
    print(f"{p.lc:>2}  {p.candidate_count:>10}  {p.precision:>9.4f}  "
          f"{p.recall:>6.3f}  {p.f1:.4f}")

selected = select_config([curve], objective="recall_floor", recall_floor=0.5)
print(f"\nselected under recall floor 0.5: model={selected[0]} k={selected[1]} "
      f"lc={selected[2]}")

chosen = [p for p in curve.points if p.lc == selected[2]][0]
possible = len(sources) * len(targets)
print(f"review load drops by {reduction_ratio(chosen.candidate_count, possible):.0%} "
      f"({chosen.candidate_count} of {possible} possible pairs)")

links = derive_links(src, tgt, LinkConfig(lc=selected[2]))
stats = candidate_stats(links, sources, possible=len(targets))
print(f"per-source candidates: mean={stats.mean:.2f} sd={stats.sd:.2f} "
      f"possible={stats.possible_links}")
