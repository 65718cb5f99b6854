"""Relational graph encodings of states, actions, transitions, and trees.

All encodings share one node space: object nodes (one per instance object,
ordered by name).  State atoms become hyperedges labeled by their predicate;
goal atoms add goal-flag edges.  The tree encoding adds one node per
successor state plus depth nodes, with successor deltas anchored on the
state nodes.  Label suffixes keep relation names collision-free with
predicate names, which cannot contain dots.
"""

from __future__ import annotations

import hashlib
import io
import json
from dataclasses import dataclass, field
from typing import BinaryIO, Iterable, Iterator, Optional, Sequence, TextIO, Union

from .ground import GroundAction, State, grounder_for
from .lookahead import LookaheadTree
from .pddl import Instance
from .protocol import (
    WIRE_VERSION,
    MalformedRecordError,
    validate_record,
)

GOAL_TRUE = "{}.goal.true"
GOAL_FALSE = "{}.goal.false"
ADD = "{}.add"
DEL = "{}.del"
GOAL_ADD = "{}.goal.add"
GOAL_DEL = "{}.goal.del"
NEXT = "{}.next"
ACTION = "act.{}"
TREE_EDGE = "tree.edge"
TREE_ROOT_EDGE = "tree.root.edge"
DEPTH_LT = "depth.lt"
DEPTH_AT = "depth.at"


@dataclass
class RelGraph:
    nodes: list[tuple[int, str, str]]
    edges: list[tuple[str, tuple[int, ...]]]
    candidates: list[int]
    meta: dict = field(default_factory=dict)

    def to_record(self) -> dict:
        return {
            "v": WIRE_VERSION,
            "kind": "graph",
            "meta": dict(self.meta),
            "nodes": [[i, k, l] for i, k, l in self.nodes],
            "edges": [[label, list(ids)] for label, ids in self.edges],
            "candidates": list(self.candidates),
        }

    @staticmethod
    def from_record(rec: dict) -> "RelGraph":
        return RelGraph(
            nodes=[(n[0], n[1], n[2]) for n in rec["nodes"]],
            edges=[(e[0], tuple(e[1])) for e in rec["edges"]],
            candidates=list(rec.get("candidates", [])),
            meta=dict(rec.get("meta", {})),
        )


@dataclass
class GraphPair:
    left: RelGraph
    right: RelGraph
    meta: dict = field(default_factory=dict)

    # a pair scores exactly one transition; candidate id 0 names it
    candidates: list[int] = field(default_factory=lambda: [0])

    def to_record(self) -> dict:
        return {
            "v": WIRE_VERSION,
            "kind": "graph_pair",
            "meta": dict(self.meta),
            "left": self.left.to_record(),
            "right": self.right.to_record(),
            "candidates": list(self.candidates),
        }

    @staticmethod
    def from_record(rec: dict) -> "GraphPair":
        return GraphPair(
            left=RelGraph.from_record(rec["left"]),
            right=RelGraph.from_record(rec["right"]),
            meta=dict(rec.get("meta", {})),
            candidates=list(rec.get("candidates", [0])),
        )


Encoded = Union[RelGraph, GraphPair]


# ---------------------------------------------------------------------------
# shared pieces


def _object_nodes(inst: Instance) -> tuple[list[tuple[int, str, str]], dict[str, int]]:
    names = sorted(inst.objects)
    nodes = [(i, "object", n) for i, n in enumerate(names)]
    return nodes, {n: i for i, n in enumerate(names)}


def _sorted_atoms(ids: Iterable[int], registry) -> list[tuple]:
    return sorted(registry.lookup(i) for i in ids)


def _state_hash(s: State, registry) -> str:
    text = ";".join("(" + " ".join(a) + ")" for a in _sorted_atoms(s.ids, registry))
    return hashlib.sha1(text.encode("utf-8")).hexdigest()[:12]


def _atom_edges(
    label_fmt: str,
    atom_ids: Iterable[int],
    registry,
    index: dict[str, int],
    anchor: Optional[int] = None,
) -> list[tuple[str, tuple[int, ...]]]:
    edges = []
    for atom in _sorted_atoms(atom_ids, registry):
        args = tuple(index[o] for o in atom[1:])
        if anchor is not None:
            args = (anchor,) + args
        edges.append((label_fmt.format(atom[0]), args))
    return edges


def _state_block(
    s: State, goal_ids: frozenset[int], registry, index: dict[str, int], suffix: str = ""
) -> list[tuple[str, tuple[int, ...]]]:
    """Atoms plus goal flags: |s| + |goal| hyperedges."""
    plain = "{}" + suffix
    edges = _atom_edges(plain, s.ids, registry, index)
    edges += _atom_edges(GOAL_TRUE + suffix, goal_ids & s.as_set, registry, index)
    edges += _atom_edges(GOAL_FALSE + suffix, goal_ids - s.as_set, registry, index)
    return edges


# ---------------------------------------------------------------------------
# encodings


def encode_state(s: State, inst: Instance) -> RelGraph:
    """State atoms with goal-flag edges over object nodes."""
    g = grounder_for(inst)
    nodes, index = _object_nodes(inst)
    edges = _state_block(s, g.goal_ids, g.registry, index)
    return RelGraph(
        nodes=nodes,
        edges=edges,
        candidates=[],
        meta={
            "instance": inst.name,
            "encoding": "state",
            "root": _state_hash(s, g.registry),
        },
    )


def encode_external(s: State, s2: State, inst: Instance) -> GraphPair:
    """Two aligned state graphs; the combination happens in the readout."""
    left = encode_state(s, inst)
    right = encode_state(s2, inst)
    g = grounder_for(inst)
    return GraphPair(
        left=left,
        right=right,
        meta={
            "instance": inst.name,
            "encoding": "ext",
            "root": _state_hash(s, g.registry),
        },
    )


def encode_aa(s: State, actions: Sequence[GroundAction], inst: Instance) -> RelGraph:
    """State graph plus one action node per ground action, related to its
    argument objects under the schema's own label."""
    g = grounder_for(inst)
    nodes, index = _object_nodes(inst)
    edges = _state_block(s, g.goal_ids, g.registry, index)
    candidates = []
    next_id = len(nodes)
    for a in actions:
        nodes.append((next_id, "action", f"{a.name}({','.join(a.args)})"))
        edges.append((ACTION.format(a.name), (next_id,) + tuple(index[o] for o in a.args)))
        candidates.append(next_id)
        next_id += 1
    return RelGraph(
        nodes=nodes,
        edges=edges,
        candidates=candidates,
        meta={
            "instance": inst.name,
            "encoding": "aa",
            "root": _state_hash(s, g.registry),
        },
    )


def encode_ad(tree: LookaheadTree, inst: Instance) -> RelGraph:
    """Whole lookahead tree in one graph: root state block, one state node
    per successor carrying anchored add/delete (and goal add/delete) edges,
    tree edges (root edges as unary markers), and depth nodes ordered by
    pairwise precedence."""
    g = grounder_for(inst)
    registry = g.registry
    nodes, index = _object_nodes(inst)
    root = tree.nodes[0].state
    edges = _state_block(root, g.goal_ids, registry, index)

    state_node: dict[int, int] = {}
    next_id = len(nodes)
    for i, tn in enumerate(tree.nodes):
        if i == 0:
            continue
        nodes.append((next_id, "state", f"s{i}"))
        state_node[i] = next_id
        next_id += 1

    depth_node: dict[int, int] = {}
    for d in range(1, tree.d_max + 1):
        nodes.append((next_id, "depth", f"d{d}"))
        depth_node[d] = next_id
        next_id += 1

    root_set = root.as_set
    for i, tn in enumerate(tree.nodes):
        if i == 0:
            continue
        anchor = state_node[i]
        added = tn.state.as_set - root_set
        deleted = root_set - tn.state.as_set
        edges += _atom_edges(ADD, added, registry, index, anchor)
        edges += _atom_edges(DEL, deleted, registry, index, anchor)
        edges += _atom_edges(GOAL_ADD, g.goal_ids & added, registry, index, anchor)
        edges += _atom_edges(GOAL_DEL, g.goal_ids & deleted, registry, index, anchor)

    for i, tn in enumerate(tree.nodes):
        if i == 0:
            continue
        if tn.parent == 0:
            edges.append((TREE_ROOT_EDGE, (state_node[i],)))
        else:
            edges.append((TREE_EDGE, (state_node[tn.parent], state_node[i])))

    for d in range(1, tree.d_max + 1):
        for d2 in range(d + 1, tree.d_max + 1):
            edges.append((DEPTH_LT, (depth_node[d], depth_node[d2])))

    for i, tn in enumerate(tree.nodes):
        if i == 0:
            continue
        edges.append((DEPTH_AT, (state_node[i], depth_node[tn.depth])))

    return RelGraph(
        nodes=nodes,
        edges=edges,
        candidates=[state_node[i] for i in range(1, len(tree.nodes))],
        meta={
            "instance": inst.name,
            "encoding": "ad",
            "root": _state_hash(root, registry),
            "d_max": tree.d_max,
        },
    )


def encode_internal(s: State, s2: State, inst: Instance) -> RelGraph:
    """Both states in one graph; the successor uses a duplicated label
    alphabet (goal flags included)."""
    g = grounder_for(inst)
    nodes, index = _object_nodes(inst)
    edges = _state_block(s, g.goal_ids, g.registry, index)
    edges += _state_block(s2, g.goal_ids, g.registry, index, suffix=".next")
    return RelGraph(
        nodes=nodes,
        edges=edges,
        candidates=[0],
        meta={
            "instance": inst.name,
            "encoding": "int",
            "root": _state_hash(s, g.registry),
        },
    )


def encode_internal_delta(s: State, s2: State, inst: Instance) -> RelGraph:
    """Current state plus unanchored add/delete (and goal add/delete) edges
    describing the transition to the successor."""
    g = grounder_for(inst)
    registry = g.registry
    nodes, index = _object_nodes(inst)
    edges = _state_block(s, g.goal_ids, registry, index)
    added = s2.as_set - s.as_set
    deleted = s.as_set - s2.as_set
    edges += _atom_edges(ADD, added, registry, index)
    edges += _atom_edges(DEL, deleted, registry, index)
    edges += _atom_edges(GOAL_ADD, g.goal_ids & added, registry, index)
    edges += _atom_edges(GOAL_DEL, g.goal_ids & deleted, registry, index)
    return RelGraph(
        nodes=nodes,
        edges=edges,
        candidates=[0],
        meta={
            "instance": inst.name,
            "encoding": "intd",
            "root": _state_hash(s, g.registry),
        },
    )


# ---------------------------------------------------------------------------
# serialization


def serialize_graph(graph: Encoded, sink: TextIO) -> None:
    """Write one graph (or pair) as a newline-delimited JSON record."""
    json.dump(graph.to_record(), sink, separators=(",", ":"))
    sink.write("\n")


def deserialize_graph(source: Union[str, TextIO]) -> Encoded:
    """Read a single record; raises MalformedRecordError with a byte offset."""
    for graph in iter_graphs(source):
        return graph
    raise MalformedRecordError("no record found", 0)


def iter_graphs(source: Union[str, TextIO]) -> Iterator[Encoded]:
    """Yield graphs from newline-delimited records, tracking byte offsets."""
    if isinstance(source, str):
        source = io.StringIO(source)
    offset = 0
    for line in source:
        raw = line.encode("utf-8") if isinstance(line, str) else line
        stripped = line.strip()
        if stripped:
            try:
                rec = json.loads(stripped)
            except json.JSONDecodeError as e:
                raise MalformedRecordError(f"invalid JSON: {e.msg}", offset)
            if not isinstance(rec, dict):
                raise MalformedRecordError("record must be a JSON object", offset)
            validate_record(rec, offset)
            if rec["kind"] == "graph":
                yield RelGraph.from_record(rec)
            elif rec["kind"] == "graph_pair":
                yield GraphPair.from_record(rec)
            else:
                raise MalformedRecordError(
                    f"expected a graph record, found '{rec['kind']}'", offset
                )
        offset += len(raw)
