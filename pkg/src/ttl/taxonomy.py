"""Hierarchical domain taxonomy: model, parsing, validation, queries.

A taxonomy is a single-rooted tree of domain concepts. Each node carries a
title and optionally a description and synonyms. Two lossless file formats are
supported: a flat CSV (``id,title,parent_id,description,synonyms``) and an
equivalent hierarchical JSON form with ``children`` arrays.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field, replace

from ttl.errors import DataError

NodeId = str


class TaxonomyError(DataError):
    """Base class for taxonomy structure errors."""


class TaxonomyFormatError(TaxonomyError):
    """Malformed row or document (syntax level)."""


class DuplicateIdError(TaxonomyError):
    """A node id occurs more than once."""


class MultipleParentsError(DuplicateIdError):
    """A node id occurs with conflicting parent ids."""


class MissingParentError(TaxonomyError):
    """A parent_id refers to an unknown node."""


class MultipleRootsError(TaxonomyError):
    """More than one node has no parent."""


class CycleError(TaxonomyError):
    """Following parent links revisits a node."""


class UnknownNodeError(TaxonomyError):
    """A queried node id does not exist."""


@dataclass(frozen=True)
class TaxonomyNode:
    """One concept in the taxonomy tree."""

    id: NodeId
    title: str
    description: str | None = None
    synonyms: tuple[str, ...] = ()
    parent: NodeId | None = None


@dataclass(frozen=True)
class Taxonomy:
    """An immutable rooted tree of domain concepts.

    ``nodes`` keeps insertion order, which makes every iteration (stats,
    eligible-node listings, serialization) deterministic. Construction does
    not validate; use :func:`parse_taxonomy` / :func:`validate_taxonomy`.
    """

    name: str
    nodes: tuple[TaxonomyNode, ...]
    provenance: dict[str, str] | None = None

    def __post_init__(self) -> None:
        by_id = {n.id: n for n in self.nodes}
        object.__setattr__(self, "_by_id", by_id)
        children: dict[NodeId, list[NodeId]] = {n.id: [] for n in self.nodes}
        for n in self.nodes:
            if n.parent is not None and n.parent in children:
                children[n.parent].append(n.id)
        object.__setattr__(self, "_children", children)

    def node(self, node_id: NodeId) -> TaxonomyNode:
        try:
            return self._by_id[node_id]  # type: ignore[attr-defined]
        except KeyError:
            raise UnknownNodeError(f"unknown node id: {node_id!r}") from None

    def has_node(self, node_id: NodeId) -> bool:
        return node_id in self._by_id  # type: ignore[attr-defined]

    def children(self, node_id: NodeId) -> list[NodeId]:
        if not self.has_node(node_id):
            raise UnknownNodeError(f"unknown node id: {node_id!r}")
        return list(self._children[node_id])  # type: ignore[attr-defined]

    @property
    def root(self) -> TaxonomyNode:
        roots = [n for n in self.nodes if n.parent is None]
        if len(roots) != 1:
            raise TaxonomyError(f"taxonomy has {len(roots)} roots, expected 1")
        return roots[0]

    def node_ids(self) -> list[NodeId]:
        return [n.id for n in self.nodes]


@dataclass(frozen=True)
class TaxonomyStats:
    """Structural counts: total nodes, leaves, categories, depth.

    ``category_count`` excludes the root, so ``leaf_count + category_count + 1
    == node_count`` on every valid tree with more than one node. ``depth``
    counts levels with the root at level 1.
    """

    node_count: int
    leaf_count: int
    category_count: int
    depth: int


@dataclass(frozen=True)
class Violation:
    """One validation finding. ``severity`` is ``error`` or ``warning``."""

    code: str
    node_ids: tuple[NodeId, ...]
    message: str
    severity: str = "error"


def validate_taxonomy(t: Taxonomy) -> list[Violation]:
    """Check every taxonomy invariant; return one report per violation.

    Violations are data, not exceptions: broken taxonomies (duplicate ids,
    multi-parent rows, cycles) can be inspected without raising. Duplicate
    titles among siblings are reported as warnings, not errors, because
    generated taxonomies routinely contain them and must still load for
    post-processing.
    """
    violations: list[Violation] = []

    seen: dict[NodeId, TaxonomyNode] = {}
    for n in t.nodes:
        if not n.title.strip():
            violations.append(
                Violation("empty_title", (n.id,), f"node {n.id!r} has an empty title")
            )
        if n.id in seen:
            if seen[n.id].parent != n.parent:
                violations.append(
                    Violation(
                        "multiple_parents",
                        (n.id,),
                        f"node {n.id!r} declared with parents "
                        f"{seen[n.id].parent!r} and {n.parent!r}",
                    )
                )
            else:
                violations.append(
                    Violation("duplicate_id", (n.id,), f"node id {n.id!r} occurs twice")
                )
        else:
            seen[n.id] = n

    known = set(seen)
    for n in seen.values():
        if n.parent is not None and n.parent not in known:
            violations.append(
                Violation(
                    "missing_parent",
                    (n.id,),
                    f"node {n.id!r} refers to unknown parent {n.parent!r}",
                )
            )

    roots = [nid for nid, n in seen.items() if n.parent is None]
    if len(roots) > 1:
        violations.append(
            Violation(
                "multiple_roots", tuple(roots), f"{len(roots)} nodes have no parent"
            )
        )
    elif not roots and seen:
        violations.append(
            Violation("no_root", (), "no node without a parent", severity="error")
        )

    # Cycle detection by walking parent links with a visited-state map.
    state: dict[NodeId, int] = {}  # 0 in progress, 1 done
    cyclic: set[NodeId] = set()
    for start in seen:
        path = []
        cur: NodeId | None = start
        while cur is not None and cur in seen:
            if cur in state:
                if state[cur] == 0:
                    cyclic.update(path[path.index(cur):] if cur in path else [cur])
                break
            state[cur] = 0
            path.append(cur)
            cur = seen[cur].parent
        for nid in path:
            state[nid] = 1
    if cyclic:
        violations.append(
            Violation(
                "cycle",
                tuple(sorted(cyclic)),
                "parent links form a cycle through: " + ", ".join(sorted(cyclic)),
            )
        )

    # Duplicate titles under one parent: warning, one report per extra sibling.
    sibling_titles: dict[tuple[NodeId | None, str], NodeId] = {}
    for n in t.nodes:
        if n.id not in seen or seen[n.id] is not n:
            continue
        key = (n.parent, normalize_title(n.title))
        if key in sibling_titles:
            violations.append(
                Violation(
                    "duplicate_title_within_branch",
                    (sibling_titles[key], n.id),
                    f"siblings {sibling_titles[key]!r} and {n.id!r} share the "
                    f"title {n.title!r}",
                    severity="warning",
                )
            )
        else:
            sibling_titles[key] = n.id
    return violations


def normalize_title(title: str) -> str:
    """Whitespace-collapsed, lowercased title used for duplicate detection."""
    return " ".join(title.split()).lower()


_FATAL_ERRORS = {
    "multiple_parents": MultipleParentsError,
    "duplicate_id": DuplicateIdError,
    "missing_parent": MissingParentError,
    "cycle": CycleError,
    "multiple_roots": MultipleRootsError,
    "no_root": CycleError,  # zero roots in a finite parent graph implies a cycle
    "empty_title": TaxonomyFormatError,
}
# Raise the most specific structural problem first.
_FATAL_ORDER = [
    "empty_title",
    "multiple_parents",
    "duplicate_id",
    "missing_parent",
    "cycle",
    "no_root",
    "multiple_roots",
]


def check_taxonomy(t: Taxonomy) -> Taxonomy:
    """Validate and return ``t``; raise the first error-severity violation."""
    violations = [v for v in validate_taxonomy(t) if v.severity == "error"]
    if violations:
        violations.sort(key=lambda v: _FATAL_ORDER.index(v.code))
        first = violations[0]
        raise _FATAL_ERRORS[first.code](first.message)
    return t


def synthesize_root(t: Taxonomy, root_id: NodeId = "root") -> Taxonomy:
    """Attach all parent-less nodes to a new root named after the taxonomy.

    No-op when the taxonomy already has exactly one root. Used for generated
    taxonomies, which often arrive as a forest of top-level concepts.
    """
    top = [n for n in t.nodes if n.parent is None]
    if len(top) == 1:
        return t
    rid = root_id
    existing = {n.id for n in t.nodes}
    while rid in existing:
        rid += "_"
    root = TaxonomyNode(id=rid, title=t.name or "root")
    reparented = tuple(
        replace(n, parent=rid) if n.parent is None else n for n in t.nodes
    )
    return Taxonomy(name=t.name, nodes=(root,) + reparented, provenance=t.provenance)


def parse_taxonomy(
    text: str, name: str = "taxonomy", allow_forest: bool = False
) -> Taxonomy:
    """Parse the flat CSV row format into a validated Taxonomy.

    Columns: ``id,title,parent_id,description,synonyms``; synonyms are
    ``;``-separated and an empty parent_id marks the root. With
    ``allow_forest`` a missing single root is repaired by synthesizing one
    named after the taxonomy instead of raising MultipleRootsError.
    """
    rows = list(csv.reader(io.StringIO(text)))
    if not rows:
        raise TaxonomyFormatError("empty taxonomy document")
    header = [h.strip().lower() for h in rows[0]]
    if header != ["id", "title", "parent_id", "description", "synonyms"]:
        raise TaxonomyFormatError(
            "expected header 'id,title,parent_id,description,synonyms', "
            f"got {','.join(header)!r}"
        )
    nodes: list[TaxonomyNode] = []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row or (len(row) == 1 and not row[0].strip()):
            continue
        if len(row) != 5:
            raise TaxonomyFormatError(
                f"line {lineno}: expected 5 fields, got {len(row)}"
            )
        node_id, title, parent_id, description, synonyms = (f.strip() for f in row)
        if not node_id:
            raise TaxonomyFormatError(f"line {lineno}: empty node id")
        if not title:
            raise TaxonomyFormatError(f"line {lineno}: empty title for {node_id!r}")
        nodes.append(
            TaxonomyNode(
                id=node_id,
                title=title,
                description=description or None,
                synonyms=tuple(s.strip() for s in synonyms.split(";") if s.strip()),
                parent=parent_id or None,
            )
        )
    if not nodes:
        raise TaxonomyFormatError("taxonomy has no nodes")
    t = Taxonomy(name=name, nodes=tuple(nodes))
    if allow_forest:
        t = synthesize_root(t)
    return check_taxonomy(t)


def parse_taxonomy_json(text: str, name: str | None = None) -> Taxonomy:
    """Parse the hierarchical JSON form (``children`` arrays) into a Taxonomy."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise TaxonomyFormatError(f"invalid JSON: {exc}") from exc
    if not isinstance(doc, dict) or "root" not in doc:
        raise TaxonomyFormatError("expected an object with a 'root' node")
    nodes: list[TaxonomyNode] = []

    def walk(obj: dict, parent: NodeId | None) -> None:
        if not isinstance(obj, dict) or "id" not in obj or "title" not in obj:
            raise TaxonomyFormatError("each node needs 'id' and 'title'")
        synonyms = tuple(obj.get("synonyms") or ())
        nodes.append(
            TaxonomyNode(
                id=str(obj["id"]),
                title=str(obj["title"]),
                description=obj.get("description") or None,
                synonyms=synonyms,
                parent=parent,
            )
        )
        for child in obj.get("children") or ():
            walk(child, str(obj["id"]))

    walk(doc["root"], None)
    provenance = doc.get("provenance")
    if provenance is not None:
        provenance = {str(k): str(v) for k, v in provenance.items()}
    return check_taxonomy(
        Taxonomy(name=name or doc.get("name", "taxonomy"), nodes=tuple(nodes),
                 provenance=provenance)
    )


def serialize_taxonomy(t: Taxonomy) -> str:
    """Render to the flat CSV format (provenance is JSON-only)."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["id", "title", "parent_id", "description", "synonyms"])
    for n in t.nodes:
        writer.writerow(
            [n.id, n.title, n.parent or "", n.description or "", ";".join(n.synonyms)]
        )
    return out.getvalue()


def serialize_taxonomy_json(t: Taxonomy) -> str:
    """Render to the hierarchical JSON form (carries provenance)."""
    children_of: dict[NodeId | None, list[TaxonomyNode]] = {}
    for n in t.nodes:
        children_of.setdefault(n.parent, []).append(n)

    def build(n: TaxonomyNode) -> dict:
        obj: dict = {"id": n.id, "title": n.title}
        if n.description:
            obj["description"] = n.description
        if n.synonyms:
            obj["synonyms"] = list(n.synonyms)
        kids = children_of.get(n.id, [])
        if kids:
            obj["children"] = [build(c) for c in kids]
        return obj

    doc: dict = {"name": t.name, "root": build(t.root)}
    if t.provenance:
        doc["provenance"] = dict(t.provenance)
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def load_taxonomy(path: str, allow_forest: bool = False) -> Taxonomy:
    """Load a taxonomy file, dispatching on content (JSON object vs CSV)."""
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    name = _stem(path)
    if text.lstrip().startswith("{"):
        return parse_taxonomy_json(text, name=name)
    return parse_taxonomy(text, name=name, allow_forest=allow_forest)


def save_taxonomy(t: Taxonomy, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(
            serialize_taxonomy_json(t) if path.endswith(".json")
            else serialize_taxonomy(t)
        )


def _stem(path: str) -> str:
    base = path.replace("\\", "/").rsplit("/", 1)[-1]
    return base.rsplit(".", 1)[0] if "." in base else base


def compute_stats(t: Taxonomy) -> TaxonomyStats:
    """Count nodes, leaves, non-root categories, and depth (root = level 1)."""
    check_taxonomy(t)
    root_id = t.root.id
    leaf = 0
    category = 0
    for n in t.nodes:
        if not t.children(n.id):
            leaf += 1
        elif n.id != root_id:
            category += 1
    depth = 1
    stack: list[tuple[NodeId, int]] = [(root_id, 1)]
    while stack:
        nid, level = stack.pop()
        depth = max(depth, level)
        stack.extend((c, level + 1) for c in t.children(nid))
    return TaxonomyStats(
        node_count=len(t.nodes), leaf_count=leaf, category_count=category, depth=depth
    )


def ancestors(t: Taxonomy, node_id: NodeId) -> list[NodeId]:
    """Ancestor ids from the root down to (excluding) ``node_id``."""
    n = t.node(node_id)
    path: list[NodeId] = []
    seen = {node_id}
    while n.parent is not None:
        if n.parent in seen:
            raise CycleError(f"cycle reached from {node_id!r}")
        seen.add(n.parent)
        path.append(n.parent)
        n = t.node(n.parent)
    path.reverse()
    return path


def class_text(t: Taxonomy, node_id: NodeId, mode: str = "rich") -> str:
    """Render a node into the text used for embedding.

    ``title`` uses the title alone; ``rich`` appends description and synonyms
    space-joined; ``path`` prefixes the root-to-node title path joined with
    " / " and then appends description/synonyms like ``rich``.
    """
    n = t.node(node_id)
    if mode == "title":
        return n.title
    extras = []
    if n.description:
        extras.append(n.description)
    extras.extend(n.synonyms)
    if mode == "rich":
        return " ".join([n.title, *extras])
    if mode == "path":
        titles = [t.node(a).title for a in ancestors(t, node_id)] + [n.title]
        return " ".join([" / ".join(titles), *extras]) if extras else " / ".join(titles)
    raise ValueError(f"unknown class_text mode: {mode!r}")
