"""Generating candidate taxonomies by replaying recorded chat conversations.

Three prompting strategies drive a chat model: one-shot generation after a
granularity question, bottom-up leaf harvesting with abstraction rounds, and
top-level listing with per-branch breakdown. Here each strategy replays a
recorded transcript, so everything runs offline and deterministically; point
the CLI at a live endpoint (`ttl taxgen --client http://...`) for real runs.

Run: python demos/04_taxonomy_generation.py
"""

from ttl.synthetic import (
    all_at_once_transcript,
    bottom_up_transcript,
    large_level_branch_transcript,
    level_branch_transcript,
)
from ttl.taxgen import ReplayChatClient, StrategySpec, dedupe_nodes, generate_taxonomy
from ttl.taxonomy import compute_stats

FIXTURES = {
    "all_at_once": all_at_once_transcript(),
    "bottom_up": bottom_up_transcript(),
    "level_branch": level_branch_transcript(),
}

print("== three strategies, replayed ==")
for kind, transcript in FIXTURES.items():
    spec = StrategySpec(kind=kind, data_source="none")
    taxonomy, run, removals = generate_taxonomy(
        spec, ReplayChatClient(transcript), name=f"{kind} demo"
    )
    s = compute_stats(taxonomy)
    print(f"{kind:>12}: {run.rounds} rounds -> n={s.node_count} l={s.leaf_count} "
          f"c={s.category_count} d={s.depth} ({len(removals)} duplicates removed)")
    print(f"{'':>14}provenance: {taxonomy.provenance}")

print("\n== deduplicating a large generated taxonomy ==")
spec = StrategySpec(kind="level_branch", data_source="standards corpus")
client = ReplayChatClient(large_level_branch_transcript())
from ttl.taxgen import assemble_taxonomy, run_strategy

run = run_strategy(spec, client)
raw = assemble_taxonomy(run.nodes, name="charging")
print(f"assembled: {len(raw.nodes)} nodes (redundant titles across branches)")
deduped, removals = dedupe_nodes(raw, policy="global_title")
print(f"after global-title dedup: {len(deduped.nodes)} nodes "
      f"({len(removals)} removed)")
print("sample removals:", [f"{r.removed_id}->{r.surviving_id}" for r in removals[:5]])
