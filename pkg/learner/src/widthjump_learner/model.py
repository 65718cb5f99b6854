"""Relational GNN over wire records, per-encoding Q readouts, and the
depth rank loss.

Nodes of every kind start at the zero embedding.  Each round, every edge
applies a per-label MLP to its endpoint embeddings and emits one message per
position; each node smooth-maxes its incoming messages componentwise and
applies a residual update.  Nodes that receive no message keep their
embedding unchanged that round, so a graph with no edges passes through
untouched.  Parameters are shared across rounds.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import torch
import torch.nn as nn
import torch.nn.functional as F

STRUCTURAL_LABELS = {
    "tree.edge": 2,
    "tree.root.edge": 1,
    "depth.lt": 2,
    "depth.at": 2,
}


class VocabError(ValueError):
    pass


def _scan_records(records: Iterable[dict]):
    """Base predicate arities, directly observed labels, and which delta
    styles the records use (state-anchored, unanchored, successor-suffixed)."""
    base: dict[str, int] = {}
    observed: dict[str, int] = {}
    styles: set[str] = set()

    def note(table, name, arity):
        if table.setdefault(name, arity) != arity:
            raise VocabError(
                f"label {name!r} seen with arities {table[name]} and {arity}"
            )

    def classify(label, arity):
        if "." not in label:
            note(base, label, arity)
        elif label.endswith(".goal.true") or label.endswith(".goal.false"):
            note(base, label.rsplit(".goal.", 1)[0], arity)

    def walk(rec):
        if rec.get("kind") == "graph_pair":
            walk(rec["left"])
            walk(rec["right"])
            return
        kinds = {nid: kind for nid, kind, _ in rec["nodes"]}
        for label, ids in rec["edges"]:
            note(observed, label, len(ids))
            if label in STRUCTURAL_LABELS or label.startswith("act."):
                continue
            if label.endswith(".next"):
                styles.add("next")
                classify(label[: -len(".next")], len(ids))
            elif (
                label.endswith(".add")
                or label.endswith(".del")
                or label.endswith(".goal.add")
                or label.endswith(".goal.del")
            ):
                stem = label.rsplit(".goal.", 1)[0] if ".goal." in label else label.rsplit(".", 1)[0]
                if ids and kinds.get(ids[0]) == "state":
                    styles.add("anchored")
                    note(base, stem, len(ids) - 1)
                else:
                    styles.add("unanchored")
                    note(base, stem, len(ids))
            else:
                classify(label, len(ids))

    for rec in records:
        walk(rec)
    return base, observed, styles


@dataclass(frozen=True)
class Vocab:
    """Relation label -> arity, fixed at training time.

    Built as the closure of the base predicate signature (goal flags and
    state-anchored delta variants exist for every predicate even if the
    sampled records never exhibited them), the structural tree/depth labels,
    and every directly observed label.  Observed labels are authoritative:
    encodings without state-node anchors flag deltas at base arity, so a
    directly seen arity overrides the closure's guess.  Unknown labels at
    inference remain a hard error."""

    labels: dict[str, int]

    @classmethod
    def from_records(cls, records: Iterable[dict]) -> "Vocab":
        base, observed, styles = _scan_records(records)
        # state-anchored deltas carry the anchor as an extra endpoint; that is
        # also the default guess when the seed records show no deltas at all
        anchor = 0 if styles == {"unanchored"} or styles == {"next"} else 1
        labels = dict(STRUCTURAL_LABELS)
        for pred, arity in base.items():
            labels[pred] = arity
            labels[f"{pred}.goal.true"] = arity
            labels[f"{pred}.goal.false"] = arity
            for suffix in (".add", ".del", ".goal.add", ".goal.del"):
                labels[pred + suffix] = arity + anchor
            if "next" in styles:
                labels[f"{pred}.next"] = arity
                labels[f"{pred}.goal.true.next"] = arity
                labels[f"{pred}.goal.false.next"] = arity
        labels.update(observed)
        return cls(labels)

    def to_json(self) -> dict:
        return dict(self.labels)

    @classmethod
    def from_json(cls, data: dict) -> "Vocab":
        return cls({str(k): int(v) for k, v in data.items()})


# ---------------------------------------------------------------------------
# tensorized graphs


@dataclass
class TGraph:
    n_nodes: int
    edges: dict[str, torch.Tensor]  # label -> long [E, arity]
    objects: torch.Tensor  # rows of object nodes
    candidates: torch.Tensor  # rows of candidate nodes, record order
    depths: torch.Tensor  # rows of depth nodes, ordered by depth number
    encoding: str


@dataclass
class TPair:
    left: TGraph
    right: TGraph


def tensorize(rec: dict, vocab: Vocab):
    if rec.get("kind") == "graph_pair":
        return TPair(_tensorize_graph(rec["left"], vocab, "state"),
                     _tensorize_graph(rec["right"], vocab, "state"))
    encoding = rec.get("meta", {}).get("encoding", "state")
    return _tensorize_graph(rec, vocab, encoding)


def _tensorize_graph(rec: dict, vocab: Vocab, encoding: str) -> TGraph:
    row = {}
    objects, depth_rows = [], []
    for i, (nid, kind, label) in enumerate(rec["nodes"]):
        row[nid] = i
        if kind == "object":
            objects.append(i)
        elif kind == "depth":
            depth_rows.append((int(label[1:]), i))
    by_label: dict[str, list[list[int]]] = {}
    for label, ids in rec["edges"]:
        arity = vocab.labels.get(label)
        if arity is None:
            raise VocabError(f"unknown relation label {label!r}")
        if arity != len(ids):
            raise VocabError(
                f"label {label!r} has arity {arity}, edge has {len(ids)} endpoints"
            )
        if arity == 0:
            continue  # no endpoints to message
        by_label.setdefault(label, []).append([row[v] for v in ids])
    edges = {
        label: torch.tensor(idx, dtype=torch.long) for label, idx in by_label.items()
    }
    return TGraph(
        n_nodes=len(rec["nodes"]),
        edges=edges,
        objects=torch.tensor(objects, dtype=torch.long),
        candidates=torch.tensor(
            [row[c] for c in rec.get("candidates", [])], dtype=torch.long
        ),
        depths=torch.tensor([i for _, i in sorted(depth_rows)], dtype=torch.long),
        encoding=encoding,
    )


# ---------------------------------------------------------------------------
# aggregation


def smooth_max_segments(
    values: torch.Tensor, segments: torch.Tensor, n: int, beta: float = 1.0
) -> tuple[torch.Tensor, torch.Tensor]:
    """Componentwise (1/beta) log sum exp(beta x) per segment.

    Returns the [n, k] aggregate and an [n] bool mask of non-empty segments;
    empty segments aggregate to the zero vector.  Satisfies
    max <= out <= max + log(count)/beta componentwise."""
    k = values.shape[1] if values.ndim == 2 else 0
    mask = torch.zeros(n, dtype=torch.bool, device=values.device)
    if values.numel() == 0:
        return torch.zeros(n, k, dtype=values.dtype, device=values.device), mask
    mask[segments] = True
    seg = segments.unsqueeze(1).expand(-1, k)
    scaled = values * beta
    mx = torch.full((n, k), -torch.inf, dtype=values.dtype, device=values.device)
    mx = mx.scatter_reduce(0, seg, scaled, reduce="amax", include_self=True)
    mx = torch.where(mask.unsqueeze(1), mx, torch.zeros_like(mx))
    sums = torch.zeros(n, k, dtype=values.dtype, device=values.device)
    sums = sums.scatter_add(0, seg, torch.exp(scaled - mx[segments]))
    safe = torch.where(mask.unsqueeze(1), sums, torch.ones_like(sums))
    out = (mx + torch.log(safe)) / beta
    return torch.where(mask.unsqueeze(1), out, torch.zeros_like(out)), mask


def _mlp(d_in: int, hidden: int, d_out: int) -> nn.Sequential:
    return nn.Sequential(
        nn.Linear(d_in, hidden), nn.Mish(),
        nn.Linear(hidden, hidden), nn.Mish(),
        nn.Linear(hidden, d_out),
    )


class QModel(nn.Module):
    """R-GNN embeddings plus the per-encoding readout heads."""

    def __init__(
        self,
        vocab: Vocab,
        dim: int = 32,
        layers: int = 3,
        hidden: int = 64,
        beta: float = 1.0,
    ):
        super().__init__()
        self.vocab = vocab
        self.dim = dim
        self.layers = layers
        self.beta = beta
        # label names may contain dots, which ModuleDict key rules reject,
        # so combiners live in a ModuleList behind an index map
        self.label_index = {label: i for i, label in enumerate(sorted(vocab.labels))}
        self.comb_p = nn.ModuleList()
        for label in sorted(vocab.labels):
            arity = vocab.labels[label]
            self.comb_p.append(
                _mlp(arity * dim, hidden, arity * dim) if arity else nn.Identity()
            )
        self.comb_u = _mlp(2 * dim, hidden, dim)
        self.read_cand = _mlp(2 * dim, hidden, 1)
        self.read_pair_inner = _mlp(2 * dim, hidden, dim)
        self.read_pair_outer = _mlp(dim, hidden, 1)
        self.read_pool = _mlp(dim, hidden, 1)
        self.depth_probe = nn.Linear(dim, 1, bias=False)

    # -- embeddings ----------------------------------------------------

    def embed(self, graphs: Sequence[TGraph]) -> tuple[torch.Tensor, list[int]]:
        """Embeddings for a disjoint union of graphs; returns (f, offsets)."""
        device = self.depth_probe.weight.device
        dtype = self.depth_probe.weight.dtype
        offsets, total = [], 0
        for g in graphs:
            offsets.append(total)
            total += g.n_nodes
        union: dict[str, list[torch.Tensor]] = {}
        for g, off in zip(graphs, offsets):
            for label, idx in g.edges.items():
                union.setdefault(label, []).append(idx + off)
        edges = {
            label: torch.cat(chunks).to(device) for label, chunks in union.items()
        }
        f = torch.zeros(total, self.dim, dtype=dtype, device=device)
        for _ in range(self.layers):
            msgs, targets = [], []
            for label, idx in edges.items():
                e, arity = idx.shape
                inp = f[idx.reshape(-1)].reshape(e, arity * self.dim)
                out = self.comb_p[self.label_index[label]](inp)
                msgs.append(out.reshape(e * arity, self.dim))
                targets.append(idx.reshape(-1))
            if not msgs:
                break
            m, mask = smooth_max_segments(
                torch.cat(msgs), torch.cat(targets), total, self.beta
            )
            upd = self.comb_u(torch.cat([f, m], dim=1))
            f = f + mask.unsqueeze(1).to(dtype) * upd
        if not torch.isfinite(f).all():
            raise FloatingPointError("non-finite node embedding")
        return f, offsets

    # -- readouts --------------------------------------------------------

    def q_graphs(self, graphs: Sequence[TGraph]) -> list[torch.Tensor]:
        """One Q tensor per graph: per candidate for aa/ad, a single pooled
        value for merged-transition graphs."""
        qs, _, _ = self.forward_graphs(graphs)
        return qs

    def forward_graphs(
        self, graphs: Sequence[TGraph]
    ) -> tuple[list[torch.Tensor], torch.Tensor, list[int]]:
        """Q tensors plus the shared node embeddings and per-graph offsets,
        so auxiliary heads (depth ranking) reuse one embedding pass."""
        f, offsets = self.embed(graphs)
        pooled = self._object_sums(f, graphs, offsets)
        out = []
        for b, (g, off) in enumerate(zip(graphs, offsets)):
            if g.encoding in ("int", "intd"):
                out.append(self.read_pool(pooled[b : b + 1]).reshape(1))
                continue
            if len(g.candidates) == 0:
                out.append(f.new_zeros(0))
                continue
            cand = f[g.candidates.to(f.device) + off]
            ctx = pooled[b].unsqueeze(0).expand(len(cand), -1)
            out.append(self.read_cand(torch.cat([cand, ctx], dim=1)).reshape(-1))
        return out, f, offsets

    def q_pairs(self, pairs: Sequence[TPair]) -> torch.Tensor:
        flat: list[TGraph] = []
        for p in pairs:
            flat += [p.left, p.right]
        f, offsets = self.embed(flat)
        qs = []
        for i, p in enumerate(pairs):
            lo, ro = offsets[2 * i], offsets[2 * i + 1]
            lobj = f[p.left.objects.to(f.device) + lo]
            robj = f[p.right.objects.to(f.device) + ro]
            inner = self.read_pair_inner(torch.cat([lobj, robj], dim=1)).sum(dim=0)
            qs.append(self.read_pair_outer(inner.unsqueeze(0)).reshape(()))
        return torch.stack(qs)

    def q_values(self, t) -> torch.Tensor:
        """Q vector for one tensorized record in candidate order."""
        if isinstance(t, TPair):
            return self.q_pairs([t])
        return self.q_graphs([t])[0]

    def depth_scores(
        self, graphs: Sequence[TGraph], f: torch.Tensor, offsets: Sequence[int]
    ) -> list[torch.Tensor]:
        """z vectors over each graph's depth nodes, shallow to deep."""
        out = []
        for g, off in zip(graphs, offsets):
            if len(g.depths) == 0:
                out.append(f.new_zeros(0))
                continue
            out.append(self.depth_probe(f[g.depths.to(f.device) + off]).reshape(-1))
        return out

    def _object_sums(self, f, graphs, offsets) -> torch.Tensor:
        rows = []
        for g, off in zip(graphs, offsets):
            rows.append(f[g.objects.to(f.device) + off].sum(dim=0))
        return torch.stack(rows)


def rank_loss(z: torch.Tensor) -> torch.Tensor:
    """(1/Z) sum over k<l of log(1 + exp(z_k - z_l)) / (l - k); depth scores
    ordered shallow to deep, so the loss pushes deeper scores higher."""
    n = z.shape[0]
    if n < 2:
        return z.sum() * 0.0
    idx = torch.triu_indices(n, n, offset=1, device=z.device)
    w = 1.0 / (idx[1] - idx[0]).to(z.dtype)
    terms = F.softplus(z[idx[0]] - z[idx[1]])
    return (w * terms).sum() / w.sum()
