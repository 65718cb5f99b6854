"""Wire format for graph records and Q-value responses.

Records are JSON objects, one per line.  Over a byte stream each message is
framed as the decimal byte length of the JSON payload, a newline, the payload,
and a trailing newline, so readers never need to scan for record boundaries.
"""

from __future__ import annotations

import json
from typing import BinaryIO, Iterator, Optional

WIRE_VERSION = 1

NODE_KINDS = frozenset({"object", "state", "depth", "action"})
ENCODINGS = frozenset({"state", "aa", "ad", "ext", "int", "intd"})


class ProtocolError(Exception):
    pass


class MalformedRecordError(ProtocolError):
    def __init__(self, message: str, offset: Optional[int] = None):
        self.offset = offset
        if offset is not None:
            message = f"{message} (byte offset {offset})"
        super().__init__(message)


# ---------------------------------------------------------------------------
# framing


def write_message(stream: BinaryIO, record: dict) -> None:
    payload = json.dumps(record, separators=(",", ":")).encode("utf-8")
    stream.write(b"%d\n" % len(payload))
    stream.write(payload)
    stream.write(b"\n")
    stream.flush()


def read_message(stream: BinaryIO) -> Optional[dict]:
    """Read one framed record; None at a clean end of stream."""
    header = stream.readline()
    if not header:
        return None
    try:
        length = int(header.strip())
    except ValueError:
        raise ProtocolError(f"bad frame header {header!r}")
    payload = stream.read(length)
    if len(payload) != length:
        raise ProtocolError("truncated frame payload")
    trailer = stream.read(1)
    if trailer not in (b"\n", b""):
        raise ProtocolError("missing frame trailer")
    try:
        record = json.loads(payload.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise MalformedRecordError(f"frame payload is not valid JSON: {e}")
    if not isinstance(record, dict):
        raise MalformedRecordError("record must be a JSON object")
    return record


# ---------------------------------------------------------------------------
# record validation


def _validate_graph_body(rec: dict, offset: Optional[int]) -> None:
    nodes = rec.get("nodes")
    edges = rec.get("edges")
    candidates = rec.get("candidates", [])
    if not isinstance(nodes, list) or not isinstance(edges, list):
        raise MalformedRecordError("graph record needs 'nodes' and 'edges' lists", offset)
    ids = set()
    for n in nodes:
        if (
            not isinstance(n, list)
            or len(n) != 3
            or not isinstance(n[0], int)
            or n[1] not in NODE_KINDS
            or not isinstance(n[2], str)
        ):
            raise MalformedRecordError(f"bad node entry {n!r}", offset)
        if n[0] in ids:
            raise MalformedRecordError(f"duplicate node id {n[0]}", offset)
        ids.add(n[0])
    for e in edges:
        if (
            not isinstance(e, list)
            or len(e) != 2
            or not isinstance(e[0], str)
            or not isinstance(e[1], list)
        ):
            raise MalformedRecordError(f"bad edge entry {e!r}", offset)
        for v in e[1]:
            if v not in ids:
                raise MalformedRecordError(f"edge references unknown node {v}", offset)
    if not isinstance(candidates, list):
        raise MalformedRecordError("'candidates' must be a list", offset)


def validate_record(rec: dict, offset: Optional[int] = None) -> dict:
    """Check one wire record; returns the record for chaining."""
    if rec.get("v") != WIRE_VERSION:
        raise MalformedRecordError(f"unsupported wire version {rec.get('v')!r}", offset)
    kind = rec.get("kind")
    if kind == "graph":
        meta = rec.get("meta", {})
        enc = meta.get("encoding")
        if enc is not None and enc not in ENCODINGS:
            raise MalformedRecordError(f"unknown encoding '{enc}'", offset)
        _validate_graph_body(rec, offset)
    elif kind == "graph_pair":
        for side in ("left", "right"):
            sub = rec.get(side)
            if not isinstance(sub, dict):
                raise MalformedRecordError(f"graph_pair lacks '{side}'", offset)
            _validate_graph_body(sub, offset)
    elif kind == "q":
        values = rec.get("values")
        if not isinstance(values, list) or not all(
            isinstance(v, (int, float)) for v in values
        ):
            raise MalformedRecordError("q record needs a numeric 'values' list", offset)
    elif kind == "error":
        if not isinstance(rec.get("message"), str):
            raise MalformedRecordError("error record needs a 'message' string", offset)
    else:
        raise MalformedRecordError(f"unknown record kind {kind!r}", offset)
    return rec


def q_record(values: list[float]) -> dict:
    return {"v": WIRE_VERSION, "kind": "q", "values": [float(v) for v in values]}


def error_record(message: str) -> dict:
    return {"v": WIRE_VERSION, "kind": "error", "message": message}
