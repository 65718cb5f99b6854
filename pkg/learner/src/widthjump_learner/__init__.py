"""Toy-scale relational GNN Q-learner over the widthjump wire format.

The package never imports widthjump: it talks to it the way any external
scorer would, through the CLI, the JSON graph records, and the framed
request/response protocol.
"""

from .records import (
    atoms_of_candidate,
    atoms_of_root,
    goal_of,
    relabel_goal,
)
from .model import QModel, Vocab, rank_loss, smooth_max_segments, tensorize
from .driver import ScorerServer
from .train import TrainConfig, load_checkpoint, train

__all__ = [
    "atoms_of_candidate",
    "atoms_of_root",
    "goal_of",
    "relabel_goal",
    "QModel",
    "Vocab",
    "rank_loss",
    "smooth_max_segments",
    "tensorize",
    "ScorerServer",
    "TrainConfig",
    "load_checkpoint",
    "train",
]
