"""Build a fixture workspace for the UI test suite.

Creates a project whose source S0 has exactly 47 candidates at LC=2 (so
pagination has three pages at the default page size) plus a second sparse
source, a ground-truth file, and active-config metadata.

Usage: python scripts/make_fixture.py <target-dir>
"""

import sys

from ttl.classifier import ArtifactKind, ArtifactRecord, Classification
from ttl.project import init_project
from ttl.taxonomy import Taxonomy, TaxonomyNode
from ttl.tracelinks import LinkConfig, derive_links


def classification(artifact_id: str, labels: list[str]) -> Classification:
    ranked = tuple((nid, 0.9 - 0.01 * i) for i, nid in enumerate(labels))
    return Classification(artifact_id=artifact_id, ranked_labels=ranked,
                          fingerprint="uifx")


def build(target: str) -> None:
    nodes = [TaxonomyNode(id="root", title="domain")] + [
        TaxonomyNode(id=f"n{i:02d}", title=f"concept {i}", parent="root",
                     description=f"description of concept {i}",
                     synonyms=(f"c{i}",))
        for i in range(1, 61)
    ]
    taxonomy = Taxonomy(name="ui fixture", nodes=tuple(nodes))

    s0_labels = [f"n{i:02d}" for i in range(1, 11)]
    sources = [classification("S0", s0_labels),
               classification("S1", [f"n{i:02d}" for i in range(50, 60)])]
    source_corpus = [
        ArtifactRecord(id="S0", kind=ArtifactKind.BUC, title="primary use case",
                       body="subscriber initiates a charging session",
                       metadata={"cluster": "core"}),
        ArtifactRecord(id="S1", kind=ArtifactKind.BUC, title="secondary use case",
                       body="operator adjusts wholesale settlement",
                       metadata={"cluster": "billing"}),
    ]

    targets, target_corpus = [], []
    for i in range(1, 61):
        tid = f"T{i:02d}"
        if i <= 47:
            labels = [f"n{((i + j) % 10) + 1:02d}" for j in range(2)]
            labels += [f"n{20 + ((i + j) % 30):02d}" for j in range(6)]
        else:
            labels = [f"n{(i % 10) + 1:02d}"]
            labels += [f"n{20 + ((i + j) % 30):02d}" for j in range(7)]
        targets.append(classification(tid, list(dict.fromkeys(labels))))
        target_corpus.append(
            ArtifactRecord(id=tid, kind=ArtifactKind.GPR, title=f"standard {i}",
                           body=f"standard requirement text {i}")
        )

    candidates = derive_links(sources, targets, LinkConfig(lc=2))
    s0_count = sum(1 for c in candidates if "S0" in (c.source_id, c.target_id))
    assert s0_count == 47, s0_count

    project = init_project(target, name="ui fixture")
    project.save_taxonomy(taxonomy)
    project.save_corpus("source", source_corpus)
    project.save_corpus("target", target_corpus)
    project.save_classifications("uifx", "source", sources)
    project.save_classifications("uifx", "target", targets)
    project.save_candidates("uifx", 2, candidates)
    project.set_active(fingerprint="uifx", lc=2, k=10, model="fixture-model",
                       provider="deterministic-hash", dim=64)
    with open(project._p("ground_truth.csv"), "w", encoding="utf-8") as fh:
        fh.write("source_id,target_id\nS0,T01\nS0,T02\nS0,T55\n")
    print(target)


if __name__ == "__main__":
    build(sys.argv[1])
