"""Loading, validating, and querying a hierarchical domain taxonomy.

Run: python demos/01_taxonomy_basics.py
"""

from ttl.taxonomy import (
    ancestors,
    class_text,
    compute_stats,
    parse_taxonomy,
    serialize_taxonomy_json,
    validate_taxonomy,
)

DOCUMENT = """id,title,parent_id,description,synonyms
root,charging,,the charging management domain,
online,online charging,root,realtime credit control during service use,OCS
offline,offline charging,root,post-usage record collection and rating,
cdr,charge data record,offline,a usage record emitted per session,CDR;usage record
quota,quota management,online,granting and tracking service units,
voice,voice call,online,,call
"""

taxonomy = parse_taxonomy(DOCUMENT, name="charging")

print("== structure ==")
stats = compute_stats(taxonomy)
print(f"n={stats.node_count}, l={stats.leaf_count}, c={stats.category_count}, d={stats.depth}")
print("violations:", validate_taxonomy(taxonomy) or "none")

print("\n== rendering class text for the embedder ==")
for mode in ("title", "rich", "path"):
    print(f"{mode:>6}: {class_text(taxonomy, 'cdr', mode)}")

print("\n== navigation ==")
print("ancestors of 'cdr':", ancestors(taxonomy, "cdr"))

print("\n== hierarchical JSON form ==")
print(serialize_taxonomy_json(taxonomy))
