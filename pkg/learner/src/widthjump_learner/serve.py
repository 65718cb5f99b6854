"""Serve greedy Q values from a trained checkpoint over framed stdio.

Run as ``python -m widthjump_learner.serve --checkpoint model.pt`` and point
the planner at it with ``--scorer cmd:...``.  Each framed graph record gets
one framed response; malformed or unscorable records produce an error record
and the process keeps serving."""

from __future__ import annotations

import argparse
import sys

import torch

from .model import tensorize
from .records import error_record, q_record, read_message, write_message
from .train import load_checkpoint


def serve(checkpoint: str, rf, wf) -> int:
    model, _, _ = load_checkpoint(checkpoint)
    vocab = model.vocab
    while True:
        try:
            rec = read_message(rf)
        except Exception as exc:
            write_message(wf, error_record(f"bad frame: {exc}"))
            return 1  # framing is unrecoverable mid-stream
        if rec is None:
            return 0
        try:
            if rec.get("kind") not in ("graph", "graph_pair"):
                raise ValueError(f"unexpected record kind {rec.get('kind')!r}")
            with torch.no_grad():
                values = model.q_values(tensorize(rec, vocab)).tolist()
            write_message(wf, q_record(values))
        except Exception as exc:  # stay alive for the next record
            write_message(wf, error_record(f"{type(exc).__name__}: {exc}"))


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="widthjump_learner.serve",
        description="framed stdio Q-value scorer",
    )
    parser.add_argument("--checkpoint", required=True, help="trained model file")
    args = parser.parse_args(argv)
    return serve(args.checkpoint, sys.stdin.buffer, sys.stdout.buffer)


if __name__ == "__main__":
    sys.exit(main())
