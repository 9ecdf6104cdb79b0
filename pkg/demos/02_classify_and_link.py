"""The voice-call example end to end: classify, match labels, derive links.

A requirement and two test cases are classified against a small taxonomy;
because they share top-K labels, trace-link candidates appear between them.

Run: python demos/02_classify_and_link.py
"""

from importlib.resources import files

from ttl.classifier import ClassifierConfig, CorpusClassifier, read_corpus_jsonl
from ttl.embedding import ProviderConfig
from ttl.taxonomy import load_taxonomy
from ttl.tracelinks import LinkConfig, derive_links

fixture = files("ttl") / "fixtures" / "voicecall"
taxonomy = load_taxonomy(str(fixture / "taxonomy.csv"))
requirements = read_corpus_jsonl((fixture / "requirements.jsonl").read_text())
tests = read_corpus_jsonl((fixture / "tests.jsonl").read_text())

cfg = ClassifierConfig(provider=ProviderConfig(dim=64), k=2)
classifier = CorpusClassifier(taxonomy, cfg)

print("== top-K labels per artifact ==")
src = classifier.classify_corpus(requirements)
tgt = classifier.classify_corpus(tests)
for c in src + tgt:
    labels = ", ".join(f"{nid} ({score:.3f})" for nid, score in c.ranked_labels)
    print(f"{c.artifact_id}: {labels}")

print("\n== trace-link candidates (requirement -> test, LC=1) ==")
for link in derive_links(src, tgt, LinkConfig(lc=1)):
    shared = ";".join(sorted(link.matched_labels))
    print(f"{link.source_id} <-> {link.target_id}  shared=[{shared}]")
