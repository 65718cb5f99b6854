"""Reading and rewriting graph wire records.

Works purely on the JSON record structure: nodes are [id, kind, label]
triples, edges are [label, [node ids...]] pairs.  Predicate names cannot
contain dots, so an edge label's suffix tells its role apart:

  pred                      atom of the root state (args are object nodes)
  pred.goal.true/false      goal flag for the root state
  pred.add / pred.del       successor delta, anchored on a state node
  pred.goal.add / .goal.del goal-relevant delta, same anchoring
  tree.*, depth.*, act.*    structural relations, untouched here

Atoms are (predicate, object name...) tuples.
"""

from __future__ import annotations

import json
from typing import BinaryIO, Optional

Atom = tuple[str, ...]

WIRE_VERSION = 1

STRUCTURAL = ("tree.", "depth.", "act.")


class RecordError(ValueError):
    pass


def _node_maps(rec: dict) -> tuple[dict[int, str], dict[int, str]]:
    """id -> kind and id -> label."""
    kinds, labels = {}, {}
    for nid, kind, label in rec["nodes"]:
        kinds[nid] = kind
        labels[nid] = label
    return kinds, labels


def _atom_from(label: str, suffix: str, ids, names: dict[int, str]) -> Atom:
    pred = label[: -len(suffix)] if suffix else label
    return (pred,) + tuple(names[i] for i in ids)


def _is_structural(label: str) -> bool:
    return label.startswith(STRUCTURAL)


def atoms_of_root(rec: dict) -> frozenset[Atom]:
    """The root state: every plain predicate edge whose args are objects."""
    _, names = _node_maps(rec)
    atoms = set()
    for label, ids in rec["edges"]:
        if "." in label:
            continue
        atoms.add(_atom_from(label, "", ids, names))
    return frozenset(atoms)


def goal_of(rec: dict) -> frozenset[Atom]:
    """The goal as flagged in the record (true and false flags together)."""
    _, names = _node_maps(rec)
    atoms = set()
    for label, ids in rec["edges"]:
        if label.endswith(".goal.true"):
            atoms.add(_atom_from(label, ".goal.true", ids, names))
        elif label.endswith(".goal.false"):
            atoms.add(_atom_from(label, ".goal.false", ids, names))
    return frozenset(atoms)


def deltas_of(rec: dict) -> dict[int, tuple[frozenset[Atom], frozenset[Atom]]]:
    """Per state-node (added, deleted) atom sets, goal duplicates ignored."""
    kinds, names = _node_maps(rec)
    added: dict[int, set[Atom]] = {}
    deleted: dict[int, set[Atom]] = {}
    for label, ids in rec["edges"]:
        if label.endswith(".goal.add") or label.endswith(".goal.del"):
            continue
        if label.endswith(".add"):
            bucket, suffix = added, ".add"
        elif label.endswith(".del"):
            bucket, suffix = deleted, ".del"
        else:
            continue
        anchor = ids[0]
        if kinds.get(anchor) != "state":
            raise RecordError(f"delta edge {label!r} not anchored on a state node")
        bucket.setdefault(anchor, set()).add(_atom_from(label, suffix, ids[1:], names))
    out = {}
    for anchor in set(added) | set(deleted):
        out[anchor] = (
            frozenset(added.get(anchor, ())),
            frozenset(deleted.get(anchor, ())),
        )
    return out


def atoms_of_candidate(rec: dict, candidate: int) -> frozenset[Atom]:
    """Full state of one candidate node: root minus deletes plus adds."""
    if candidate not in rec.get("candidates", []):
        raise RecordError(f"node {candidate} is not a candidate of this record")
    root = atoms_of_root(rec)
    add, delete = deltas_of(rec).get(candidate, (frozenset(), frozenset()))
    return (root - delete) | add


def relabel_goal(rec: dict, new_goal: frozenset[Atom]) -> dict:
    """A copy of the record with every goal-flag relation regenerated for
    new_goal.  Plain atom, delta, and structural edges are kept verbatim;
    goal flags are appended per block in sorted atom order."""
    if not new_goal:
        raise RecordError("relabeled goal must be non-empty")
    if any(label.endswith(".next") for label, _ in rec["edges"]):
        raise RecordError("merged-transition records cannot be goal-relabeled")
    kinds, names = _node_maps(rec)
    index = {name: nid for nid, name in names.items() if kinds[nid] == "object"}

    def ids_of(atom: Atom) -> list[int]:
        try:
            return [index[o] for o in atom[1:]]
        except KeyError as e:
            raise RecordError(f"goal atom {atom} names unknown object {e}")

    root = atoms_of_root(rec)
    kept = []
    root_flags = []
    delta_flags: dict[int, list] = {}
    for label, ids in rec["edges"]:
        if label.endswith(".goal.true") or label.endswith(".goal.false"):
            continue
        if label.endswith(".goal.add") or label.endswith(".goal.del"):
            continue
        kept.append([label, list(ids)])
        if "." not in label or _is_structural(label):
            continue
        if label.endswith(".add") or label.endswith(".del"):
            suffix = ".add" if label.endswith(".add") else ".del"
            atom = _atom_from(label, suffix, ids[1:], names)
            if atom in new_goal:
                delta_flags.setdefault(ids[0], []).append(
                    (atom, [label[: -len(suffix)] + ".goal" + suffix, list(ids)])
                )
    for atom in sorted(new_goal & root):
        root_flags.append([atom[0] + ".goal.true", ids_of(atom)])
    for atom in sorted(new_goal - root):
        root_flags.append([atom[0] + ".goal.false", ids_of(atom)])

    edges = kept + root_flags
    for anchor in sorted(delta_flags):
        edges += [e for _, e in sorted(delta_flags[anchor])]

    out = dict(rec)
    out["edges"] = edges
    meta = dict(rec.get("meta", {}))
    meta["relabeled_goal"] = sorted(" ".join(a) for a in new_goal)
    out["meta"] = meta
    return out


# ---------------------------------------------------------------------------
# framing, mirrored from the wire contract

def write_message(stream: BinaryIO, record: dict) -> None:
    payload = json.dumps(record, separators=(",", ":")).encode("utf-8")
    stream.write(b"%d\n" % len(payload))
    stream.write(payload)
    stream.write(b"\n")
    stream.flush()


def read_message(stream: BinaryIO) -> Optional[dict]:
    header = stream.readline()
    if not header:
        return None
    length = int(header.strip())
    payload = stream.read(length)
    if len(payload) != length:
        raise RecordError("truncated frame payload")
    trailer = stream.read(1)
    if trailer not in (b"\n", b""):
        raise RecordError("missing frame trailer")
    rec = json.loads(payload.decode("utf-8"))
    if not isinstance(rec, dict):
        raise RecordError("record must be a JSON object")
    return rec


def q_record(values) -> dict:
    return {"v": WIRE_VERSION, "kind": "q", "values": [float(v) for v in values]}


def error_record(message: str) -> dict:
    return {"v": WIRE_VERSION, "kind": "error", "message": message}
