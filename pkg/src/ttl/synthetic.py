"""Deterministic synthetic fixtures: taxonomies, corpora, transcripts.

Everything here is seeded or purely arithmetic so fixtures are byte-identical
across runs and processes. Used by the test suite and the demo scripts; none
of it participates in production classification.
"""

from __future__ import annotations

import random

from ttl.classifier import ArtifactKind, ArtifactRecord, Classification
from ttl.taxgen import ChatTurn
from ttl.taxonomy import Taxonomy, TaxonomyNode, check_taxonomy

WORDS = (
    "charging billing session tariff invoice account subscriber roaming "
    "network packet voice call data usage event record quota balance credit "
    "policy rating mediation gateway session bundle plan offer discount tax "
    "payment settlement refund dispute ledger meter counter threshold alert "
    "notification provisioning activation suspension termination migration "
    "interconnect wholesale retail prepaid postpaid hybrid converged online "
    "offline realtime batch streaming latency throughput capacity overload"
).split()


def word_text(rng: random.Random, n_words: int) -> str:
    return " ".join(rng.choice(WORDS) for _ in range(n_words))


def random_taxonomy(seed: int, n_nodes: int, name: str = "synthetic") -> Taxonomy:
    """A valid random tree with distinct two-word titles."""
    rng = random.Random(seed)
    nodes = [TaxonomyNode(id="n000", title="domain root")]
    titles = {"domain root"}
    for i in range(1, n_nodes):
        parent = nodes[rng.randrange(len(nodes))].id
        title = f"{rng.choice(WORDS)} {rng.choice(WORDS)} {i}"
        while title in titles:
            title = f"{rng.choice(WORDS)} {rng.choice(WORDS)} {i}x"
        titles.add(title)
        nodes.append(TaxonomyNode(id=f"n{i:03d}", title=title, parent=parent))
    return check_taxonomy(Taxonomy(name=name, nodes=tuple(nodes)))


def random_corpus(
    seed: int,
    count: int,
    kind: ArtifactKind = ArtifactKind.REQUIREMENT,
    prefix: str = "A",
    words_per_body: int = 18,
) -> list[ArtifactRecord]:
    rng = random.Random(seed)
    return [
        ArtifactRecord(
            id=f"{prefix}{i:04d}",
            kind=kind,
            body=word_text(rng, words_per_body),
            title=word_text(rng, 3),
        )
        for i in range(count)
    ]


def random_classifications(
    seed: int,
    artifact_ids: list[str],
    node_ids: list[str],
    k: int,
    fingerprint: str = "fixture",
) -> list[Classification]:
    """Label sets sampled uniformly; scores descend deterministically."""
    rng = random.Random(seed)
    out = []
    for aid in artifact_ids:
        chosen = rng.sample(node_ids, min(k, len(node_ids)))
        ranked = tuple(
            (nid, round(1.0 - 0.01 * rank, 6)) for rank, nid in enumerate(chosen)
        )
        out.append(
            Classification(artifact_id=aid, ranked_labels=ranked,
                           fingerprint=fingerprint)
        )
    return out


def shaped_tree(
    leaf_count: int,
    category_count: int,
    depth: int,
    name: str = "shaped",
) -> Taxonomy:
    """A tree with exact leaf/category counts and depth (root at level 1).

    Categories (non-root internal nodes) are chained to realize the requested
    depth, then spread across levels 2..depth-1; leaves fill level ``depth``
    under the last categories and level 2 under the root for the remainder.
    """
    if depth < 2 or category_count < depth - 2 or leaf_count < 1:
        raise ValueError("unsatisfiable shape")
    nodes = [TaxonomyNode(id="c0", title=f"{name} root")]
    # One chain of categories root->c1->...->c(depth-2) pins the depth.
    chain_len = depth - 2
    for i in range(1, chain_len + 1):
        nodes.append(
            TaxonomyNode(id=f"c{i}", title=f"category {i}", parent=f"c{i-1}")
        )
    # Remaining categories hang off the root (level 2); each needs >= 1 child
    # leaf so it stays a category.
    extra = category_count - chain_len
    for j in range(extra):
        nodes.append(
            TaxonomyNode(id=f"e{j}", title=f"branch category {j}", parent="c0")
        )
    leaves_needed = leaf_count
    lid = 0

    def add_leaf(parent: str) -> None:
        nonlocal lid, leaves_needed
        nodes.append(
            TaxonomyNode(id=f"l{lid}", title=f"leaf concept {lid}", parent=parent)
        )
        lid += 1
        leaves_needed -= 1

    # Deepest chain category gets a leaf at the max level.
    if chain_len:
        add_leaf(f"c{chain_len}")
    for j in range(extra):
        if leaves_needed <= 0:
            raise ValueError("not enough leaves to feed every category")
        add_leaf(f"e{j}")
    while leaves_needed > 0:
        add_leaf("c0")
    return check_taxonomy(Taxonomy(name=name, nodes=tuple(nodes)))


# --- recorded-conversation fixtures ---------------------------------------------


def _outline(lines: list[tuple[int, str, str]]) -> str:
    """Render (depth, raw_id, title) rows as a dotted-numbered outline."""
    return "\n".join(f"{'  ' * (d - 1)}{rid} {title}" for d, rid, title in lines)


def all_at_once_transcript(node_count: int = 68) -> list[ChatTurn]:
    """One generation round after the granularity answer.

    The outline nests concepts three deep and totals ``node_count`` lines.
    """
    lines: list[tuple[int, str, str]] = []
    i = 0
    top = 0
    while i < node_count:
        top += 1
        lines.append((1, f"{top}", f"area {top}"))
        i += 1
        for sub in range(1, 4):
            if i >= node_count:
                break
            lines.append((2, f"{top}.{sub}", f"area {top} concept {sub}"))
            i += 1
            for leaf in range(1, 3):
                if i >= node_count:
                    break
                lines.append(
                    (3, f"{top}.{sub}.{leaf}", f"area {top} concept {sub} item {leaf}")
                )
                i += 1
    return [
        ChatTurn("assistant",
                 "Before I build the taxonomy: what level of granularity do "
                 "you need (for example, 2, 3 or 4 levels)?"),
        ChatTurn("assistant",
                 "Here is the taxonomy:\n" + _outline(lines)),
    ]


def bottom_up_transcript() -> list[ChatTurn]:
    """Leaf rounds, two quiet probes, abstraction rounds, two quiet probes."""
    leaves_1 = [(1, f"{i}", f"base activity {i}") for i in range(1, 13)]
    leaves_2 = [(1, f"{i}", f"base activity {i}") for i in range(13, 21)]
    parents = [(1, f"{i}", f"group {i - 100}") for i in range(101, 105)]
    return [
        ChatTurn("assistant", "Bottom-level nodes:\n" + _outline(leaves_1)),
        ChatTurn("assistant", "A few more bottom-level nodes:\n" + _outline(leaves_2)),
        ChatTurn("assistant", "No, those are all the bottom-level nodes I can identify."),
        ChatTurn("assistant", "That completes the bottom level."),
        ChatTurn("assistant", "Abstracting these into parent nodes:\n" + _outline(parents)),
        ChatTurn("assistant", "The parent nodes above cover all groups; the root would be the domain itself."),
        ChatTurn("assistant", "Nothing further to abstract."),
    ]


def level_branch_transcript(
    tops: int = 3, subs_per_top: int = 3, leaves_per_sub: int = 2
) -> list[ChatTurn]:
    """Top-level round plus one breakdown round per top node (to depth 3)."""
    turns = [
        ChatTurn(
            "assistant",
            "Top-level nodes:\n"
            + _outline([(1, f"{i}", f"domain area {i}") for i in range(1, tops + 1)]),
        )
    ]
    for i in range(1, tops + 1):
        lines: list[tuple[int, str, str]] = [(1, f"{i}", f"domain area {i}")]
        for s in range(1, subs_per_top + 1):
            lines.append((2, f"{i}.{s}", f"area {i} topic {s}"))
            for leaf in range(1, leaves_per_sub + 1):
                lines.append((3, f"{i}.{s}.{leaf}", f"area {i} topic {s} detail {leaf}"))
        turns.append(
            ChatTurn("assistant", f"Breakdown of node {i}:\n" + _outline(lines))
        )
    return turns


def large_level_branch_transcript(
    tops: int = 6,
    subs_per_top: int = 8,
    unique_leaves: int = 620,
    duplicate_leaves: int = 184,
) -> list[ChatTurn]:
    """A breakdown transcript yielding tops+subs+leaves outline nodes.

    ``duplicate_leaves`` of the leaf lines reuse titles that occurred under an
    earlier branch, so a global-title dedup removes exactly that many nodes.
    Defaults: 6 + 48 + 804 outline nodes = 858, 859 once assembled under a
    synthesized root, and 859 - 184 = 675 after dedup.
    """
    total_subs = tops * subs_per_top
    leaf_titles = [f"fine grained concept {i}" for i in range(unique_leaves)]
    # Distribute unique leaves round-robin across subs, then append duplicates
    # under later subs than their originals.
    per_sub: list[list[str]] = [[] for _ in range(total_subs)]
    for i, title in enumerate(leaf_titles):
        per_sub[i % total_subs].append(title)
    for d in range(duplicate_leaves):
        original_sub = d % total_subs
        target_sub = (original_sub + 1 + total_subs // 2) % total_subs
        per_sub[target_sub].append(leaf_titles[d])

    turns = [
        ChatTurn(
            "assistant",
            "Top-level nodes:\n"
            + _outline([(1, f"{i}", f"major area {i}") for i in range(1, tops + 1)]),
        )
    ]
    sub_index = 0
    for i in range(1, tops + 1):
        lines: list[tuple[int, str, str]] = [(1, f"{i}", f"major area {i}")]
        for s in range(1, subs_per_top + 1):
            lines.append((2, f"{i}.{s}", f"area {i} capability {s}"))
            for leaf_no, title in enumerate(per_sub[sub_index], start=1):
                lines.append((3, f"{i}.{s}.{leaf_no}", title))
            sub_index += 1
        turns.append(
            ChatTurn("assistant", f"Breakdown of node {i}:\n" + _outline(lines))
        )
    return turns
