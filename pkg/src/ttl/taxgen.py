"""Candidate-taxonomy generation by driving a chat-completion endpoint.

Three scripted conversation strategies produce outline-formatted node lists:
one-shot generation after a granularity question, bottom-up leaf harvesting
followed by abstraction rounds, and top-level listing with per-branch
breakdown. Assistant outputs are parsed into raw node lines, assembled into a
valid taxonomy under a synthesized root, and deduplicated.

Conversations can run live over HTTP or be replayed from recorded transcript
fixtures; replaying the same fixture always yields byte-identical output.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, replace

import requests

from ttl.errors import DataError, TransportError
from ttl.taxonomy import (
    Taxonomy,
    TaxonomyNode,
    check_taxonomy,
    normalize_title,
)

ALL_AT_ONCE_INSTRUCTIONS = (
    "You are an expert in the telecommunication domain. Your task is to build "
    "a taxonomy specific to the telecommunication charging management domain. "
    "Each node in the taxonomy should represent an entity from the domain. "
    "Start by asking the user the level of granularity needed. Then build the "
    "taxonomy with the required level of granularity. Make sure to give a "
    "unique numerical ID for each node"
)

BOTTOM_UP_INSTRUCTIONS = (
    "You are an expert in the telecommunication domain. Your task is to build "
    "a taxonomy specific to the telecommunication charging management domain. "
    "Each node in the taxonomy should represent an entity from the domain. "
    "You need to use a bottom-up approach. First, provide a list of the "
    "bottom-level nodes, then ask the user if they want to abstract from "
    "these nodes further until they say stop or you reach the root node of "
    "the taxonomy. Make sure to give a unique numerical ID for each node"
)

LEVEL_BRANCH_INSTRUCTIONS = (
    "You are an expert in the telecommunication domain. Your task is to build "
    "a taxonomy specific to the telecommunication charging management domain. "
    "Each node in the taxonomy should represent an entity from the domain. "
    "Start by identifying the top-level nodes, then ask the user if they want "
    "to break down a specific node and the required depth level (e.g., 2,3,4, "
    "etc.), while considering the top level as depth level 1. Make sure to "
    "give a unique numerical ID for each node"
)

DEFAULT_INSTRUCTIONS = {
    "all_at_once": ALL_AT_ONCE_INSTRUCTIONS,
    "bottom_up": BOTTOM_UP_INSTRUCTIONS,
    "level_branch": LEVEL_BRANCH_INSTRUCTIONS,
}

MORE_NODES_PROBE = "are there more nodes?"
ABSTRACT_PROBE = (
    "Please abstract these nodes into higher-level parent nodes, continuing "
    "until you reach a single root node."
)


class ClientError(TransportError):
    """Chat endpoint unreachable, non-200, or replay fixture exhausted."""


class MaxRoundsExceededError(DataError):
    """The conversation did not converge within the round budget."""


class UnparseableOutputError(DataError):
    """A generation round produced no recognizable node lines."""


class EmptyNodeListError(DataError):
    """Taxonomy assembly needs at least one node line."""


@dataclass(frozen=True)
class ChatTurn:
    role: str  # system | user | assistant
    content: str

    def __post_init__(self) -> None:
        if self.role not in ("system", "user", "assistant"):
            raise DataError(f"unknown chat role: {self.role!r}")
        if not self.content:
            raise DataError("chat turn content must be non-empty")


@dataclass(frozen=True)
class RawNodeLine:
    """One outline line: raw id token, title, inferred depth, parent hint."""

    raw_id: str
    title: str
    depth: int
    parent_hint: str | None = None


@dataclass(frozen=True)
class StrategySpec:
    """Which strategy to run and the scripted user-side answers."""

    kind: str  # all_at_once | bottom_up | level_branch
    instructions: str | None = None
    corpus: tuple[str, ...] = ()
    data_source: str = "none"
    max_rounds: int = 20
    granularity_answer: str = "Use four levels of granularity."
    breakdown_depth: int = 3
    corpus_char_budget: int = 12000

    def __post_init__(self) -> None:
        if self.kind not in DEFAULT_INSTRUCTIONS:
            raise DataError(f"unknown strategy kind: {self.kind!r}")
        if self.max_rounds < 1:
            raise DataError("max_rounds must be >= 1")

    @property
    def system_instructions(self) -> str:
        return self.instructions or DEFAULT_INSTRUCTIONS[self.kind]

    def corpus_excerpt(self) -> str | None:
        """Concatenated document excerpts fitted into the character budget.

        When over budget the oldest documents are truncated first, keeping
        the most recently supplied material intact.
        """
        if not self.corpus:
            return None
        docs = list(self.corpus)
        total = sum(len(d) for d in docs) + 2 * (len(docs) - 1)
        idx = 0
        while total > self.corpus_char_budget and idx < len(docs):
            overflow = total - self.corpus_char_budget
            if len(docs[idx]) <= overflow:
                total -= len(docs[idx]) + 2
                docs[idx] = ""
                idx += 1
            else:
                docs[idx] = docs[idx][overflow:]
                total -= overflow
        joined = "\n\n".join(d for d in docs if d)
        return "Context documents:\n\n" + joined if joined else None


@dataclass
class StrategyRun:
    """Everything a strategy execution produced."""

    transcript: list[ChatTurn]
    nodes: list[RawNodeLine]
    rounds: int


class HttpChatClient:
    """Chat-completion over ``POST /chat`` with a JSON messages payload."""

    def __init__(
        self,
        endpoint: str,
        model_id: str = "default",
        session: requests.Session | None = None,
        timeout: float = 120.0,
    ) -> None:
        self.endpoint = endpoint
        self.model_id = model_id
        self.session = session or requests.Session()
        self.timeout = timeout

    def complete(self, messages: list[ChatTurn]) -> str:
        payload = {
            "model": self.model_id,
            "messages": [{"role": m.role, "content": m.content} for m in messages],
        }
        try:
            response = self.session.post(
                self.endpoint, json=payload, timeout=self.timeout
            )
        except requests.RequestException as exc:
            raise ClientError(f"chat endpoint unreachable: {exc}")
        if response.status_code != 200:
            raise ClientError(f"chat endpoint returned {response.status_code}")
        content = response.json().get("content")
        if not isinstance(content, str) or not content:
            raise ClientError("chat endpoint returned no content")
        return content


class ReplayChatClient:
    """Replays the assistant turns of a recorded transcript, in order."""

    model_id = "replay"

    def __init__(self, transcript: list[ChatTurn]) -> None:
        self._assistant_turns = [t for t in transcript if t.role == "assistant"]
        self._cursor = 0

    @classmethod
    def from_file(cls, path: str) -> "ReplayChatClient":
        return cls(load_transcript(path))

    def complete(self, messages: list[ChatTurn]) -> str:
        if self._cursor >= len(self._assistant_turns):
            raise ClientError("replay transcript exhausted")
        content = self._assistant_turns[self._cursor].content
        self._cursor += 1
        return content


def load_transcript(path: str) -> list[ChatTurn]:
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    return [ChatTurn(role=t["role"], content=t["content"]) for t in data]


def save_transcript(transcript: list[ChatTurn], path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(
            [{"role": t.role, "content": t.content} for t in transcript],
            fh,
            indent=2,
            ensure_ascii=False,
        )
        fh.write("\n")


# --- outline parsing ----------------------------------------------------------

_OUTLINE_RE = re.compile(
    r"^(?P<indent>\s*)(?:[-*]\s+)?(?P<id>\d+(?:\.\d+)*)[.):]?\s+(?P<title>\S.*)$"
)


def parse_node_lines(text: str) -> list[RawNodeLine]:
    """Extract outline lines, skipping prose.

    Recognizes ``<number> <title>`` lines where nesting comes from dotted
    numbering (1.2.3) or indentation; dotted ids win when both are present.
    Unrecognized lines are silently skipped (an all-prose round surfaces as
    UnparseableOutputError in the driver).
    """
    nodes: list[RawNodeLine] = []
    # (indent width, depth, raw id) of open outline levels, innermost last.
    stack: list[tuple[int, int, str]] = []
    for line in text.splitlines():
        m = _OUTLINE_RE.match(line.rstrip())
        if not m:
            continue
        raw_id = m.group("id")
        title = m.group("title").strip()
        if not title:
            continue
        indent = len(m.group("indent").expandtabs(4))
        dotted = "." in raw_id
        if dotted:
            depth = raw_id.count(".") + 1
            parent_hint: str | None = raw_id.rsplit(".", 1)[0]
        else:
            while stack and indent < stack[-1][0]:
                stack.pop()
            if not stack:
                depth = 1
            elif indent == stack[-1][0]:
                depth = stack[-1][1]
            else:
                depth = stack[-1][1] + 1
            parent_hint = None
            for pi, pd, pid in reversed(stack):
                if pd < depth:
                    parent_hint = pid
                    break
        if stack and stack[-1][0] == indent:
            stack[-1] = (indent, depth, raw_id)
        else:
            while stack and indent < stack[-1][0]:
                stack.pop()
            stack.append((indent, depth, raw_id))
        nodes.append(
            RawNodeLine(raw_id=raw_id, title=title, depth=depth,
                        parent_hint=parent_hint)
        )
    return nodes


# --- conversation driver ------------------------------------------------------


def run_strategy(spec: StrategySpec, client) -> StrategyRun:
    """Execute the scripted conversation for one strategy.

    Returns the full transcript plus the accumulated node lines (unique by
    raw id + normalized title, first occurrence kept).
    """
    transcript: list[ChatTurn] = [ChatTurn("system", spec.system_instructions)]
    excerpt = spec.corpus_excerpt()
    if excerpt:
        transcript.append(ChatTurn("user", excerpt))

    nodes: list[RawNodeLine] = []
    seen: set[tuple[str, str]] = set()
    rounds = 0

    def ask(user_content: str | None) -> str:
        nonlocal rounds
        if user_content is not None:
            transcript.append(ChatTurn("user", user_content))
        rounds += 1
        reply = client.complete(list(transcript))
        transcript.append(ChatTurn("assistant", reply))
        return reply

    def absorb(reply: str) -> int:
        new = 0
        for line in parse_node_lines(reply):
            key = (line.raw_id, normalize_title(line.title))
            if key in seen:
                continue
            seen.add(key)
            nodes.append(line)
            new += 1
        return new

    if spec.kind == "all_at_once":
        ask(None)  # the model asks for the granularity; nothing to parse
        reply = ask(spec.granularity_answer)
        if absorb(reply) == 0:
            raise UnparseableOutputError("generation round produced no node lines")

    elif spec.kind == "bottom_up":
        reply = ask(None)
        if absorb(reply) == 0:
            raise UnparseableOutputError("leaf round produced no node lines")
        _probe_until_quiet(spec, ask, absorb, MORE_NODES_PROBE, rounds_used=rounds)
        _probe_until_quiet(spec, ask, absorb, ABSTRACT_PROBE, rounds_used=rounds)

    elif spec.kind == "level_branch":
        reply = ask(None)
        top_lines = [
            line for line in parse_node_lines(reply) if line.depth == 1
        ]
        if absorb(reply) == 0 or not top_lines:
            raise UnparseableOutputError("top-level round produced no node lines")
        for line in top_lines:
            if rounds >= spec.max_rounds:
                raise MaxRoundsExceededError(
                    f"breakdown needs more than {spec.max_rounds} rounds"
                )
            reply = ask(
                f"Break down node {line.raw_id} ({line.title}) to depth level "
                f"{spec.breakdown_depth}."
            )
            if absorb(reply) == 0:
                raise UnparseableOutputError(
                    f"breakdown of node {line.raw_id} produced no node lines"
                )
    return StrategyRun(transcript=transcript, nodes=nodes, rounds=rounds)


def _probe_until_quiet(spec, ask, absorb, probe: str, rounds_used: int) -> None:
    """Repeat a probe until two consecutive replies add no new node lines."""
    quiet = 0
    while quiet < 2:
        if rounds_used >= spec.max_rounds:
            raise MaxRoundsExceededError(
                f"conversation exceeded {spec.max_rounds} rounds"
            )
        reply = ask(probe)
        rounds_used += 1
        quiet = quiet + 1 if absorb(reply) == 0 else 0


# --- assembly & deduplication ---------------------------------------------------


def assemble_taxonomy(lines: list[RawNodeLine], name: str) -> Taxonomy:
    """Build a valid taxonomy from raw outline lines.

    A root named after the taxonomy is always synthesized; orphan lines and
    depth jumps attach to the nearest enclosing line or the root; duplicate
    raw ids get regenerated unique ids with titles preserved.
    """
    if not lines:
        raise EmptyNodeListError("no node lines to assemble")
    used: set[str] = {"root"}
    assigned: list[str] = []
    first_id_for_raw: dict[str, str] = {}
    for line in lines:
        node_id = line.raw_id
        suffix = 2
        while node_id in used:
            node_id = f"{line.raw_id}_{suffix}"
            suffix += 1
        used.add(node_id)
        assigned.append(node_id)
        first_id_for_raw.setdefault(line.raw_id, node_id)

    nodes: list[TaxonomyNode] = [TaxonomyNode(id="root", title=name)]
    placed: set[str] = set()
    for i, line in enumerate(lines):
        parent_id = "root"
        if line.parent_hint and line.parent_hint in first_id_for_raw:
            hint_target = first_id_for_raw[line.parent_hint]
            # only accept hints that point at an earlier line
            if hint_target in placed:
                parent_id = hint_target
        if parent_id == "root":
            for j in range(i - 1, -1, -1):
                if lines[j].depth < line.depth:
                    parent_id = assigned[j]
                    break
        placed.add(assigned[i])
        nodes.append(
            TaxonomyNode(
                id=assigned[i], title=" ".join(line.title.split()), parent=parent_id
            )
        )
    return check_taxonomy(Taxonomy(name=name, nodes=tuple(nodes)))


@dataclass(frozen=True)
class Removal:
    """One dedup event: which node was merged into which survivor."""

    removed_id: str
    surviving_id: str
    title: str
    policy: str


def dedupe_nodes(t: Taxonomy, policy: str = "within_branch") -> tuple[Taxonomy, list[Removal]]:
    """Merge duplicate-titled nodes; returns the new taxonomy and a report.

    ``within_branch`` merges same-titled siblings (first occurrence survives,
    children are reparented to it); ``global_title`` additionally merges
    identical titles anywhere in the tree into their first occurrence. Both
    run to a fixpoint, so applying twice equals applying once. The root is
    never removed.
    """
    if policy not in ("within_branch", "global_title"):
        raise DataError(f"unknown dedupe policy: {policy!r}")
    check_taxonomy(t)
    order = [n.id for n in t.nodes]
    live: dict[str, TaxonomyNode] = {n.id: n for n in t.nodes}
    root_id = t.root.id
    removals: list[Removal] = []

    def is_descendant(candidate: str, ancestor: str) -> bool:
        cur = live[candidate].parent
        while cur is not None:
            if cur == ancestor:
                return True
            cur = live[cur].parent
        return False

    def merge(removed_id: str, survivor_id: str) -> None:
        removed = live[removed_id]
        for nid in list(live):
            node = live[nid]
            if node.parent != removed_id:
                continue
            if nid == survivor_id or is_descendant(survivor_id, nid):
                live[nid] = replace(node, parent=removed.parent)
            else:
                live[nid] = replace(node, parent=survivor_id)
        del live[removed_id]
        removals.append(
            Removal(
                removed_id=removed_id,
                surviving_id=survivor_id,
                title=removed.title,
                policy=policy,
            )
        )

    changed = True
    while changed:
        changed = False
        groups: dict[tuple[str | None, str] | str, list[str]] = {}
        for nid in order:
            if nid not in live or nid == root_id:
                continue
            node = live[nid]
            key = (
                normalize_title(node.title)
                if policy == "global_title"
                else (node.parent, normalize_title(node.title))
            )
            groups.setdefault(key, []).append(nid)
        for members in groups.values():
            if len(members) < 2:
                continue
            survivor = members[0]
            for extra in members[1:]:
                if extra in live and survivor in live:
                    merge(extra, survivor)
                    changed = True

    nodes = tuple(live[nid] for nid in order if nid in live)
    return check_taxonomy(Taxonomy(name=t.name, nodes=nodes, provenance=t.provenance)), removals


def write_dedup_report(removals: list[Removal]) -> str:
    lines = ["removed_id,surviving_id,title,policy"]
    for r in removals:
        lines.append(f"{r.removed_id},{r.surviving_id},{_csv_escape(r.title)},{r.policy}")
    return "\n".join(lines) + "\n"


def _csv_escape(value: str) -> str:
    if any(c in value for c in ',"\n'):
        return '"' + value.replace('"', '""') + '"'
    return value


def generate_taxonomy(
    spec: StrategySpec,
    client,
    name: str,
    dedupe_policy: str = "global_title",
) -> tuple[Taxonomy, StrategyRun, list[Removal]]:
    """Run a strategy end to end: converse, assemble, dedupe, stamp provenance."""
    run = run_strategy(spec, client)
    assembled = assemble_taxonomy(run.nodes, name)
    deduped, removals = dedupe_nodes(assembled, dedupe_policy)
    provenance = {
        "strategy": spec.kind,
        "data_source": spec.data_source,
        "model": getattr(client, "model_id", "unknown"),
    }
    final = Taxonomy(name=deduped.name, nodes=deduped.nodes, provenance=provenance)
    return final, run, removals
