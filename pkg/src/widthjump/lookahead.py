"""Width-pruned breadth-first lookahead trees.

The tree is grown layer by layer from a root state.  A generated successor is
kept when its novelty check passes and no equal state is already in the tree.
Once a kept successor satisfies the goal the current layer is finished and no
deeper layer is opened.  The capacity variant additionally limits how many
nodes of a finished layer are expanded, ranked by the number of satisfied
goal atoms (first seen wins ties).
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable, Optional

from .ground import GroundAction, State, grounder_for
from .novelty import table_for
from .pddl import Instance

DEFAULT_CAPACITY = 1000
DEFAULT_MAX_STATES = 100_000

VARIANTS = ("iw", "aiw", "baiw", "caiw")


@dataclass
class LookaheadConfig:
    variant: str = "iw"
    k: int = 1
    capacity: Optional[int] = None  # caiw only; defaults to DEFAULT_CAPACITY
    max_states: Optional[int] = DEFAULT_MAX_STATES
    max_depth: Optional[int] = None
    register_pruned: bool = True  # register forms of non-retained states too
    kernel: Optional[Callable[[], object]] = None

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown search variant '{self.variant}'")
        if self.k not in (1, 2):
            raise ValueError("k must be 1 or 2")
        if self.capacity is not None and self.variant != "caiw":
            raise ValueError("capacity applies to the caiw variant only")
        if self.capacity is not None and self.capacity < 1:
            raise ValueError("capacity must be positive")


@dataclass
class TreeNode:
    state: State
    depth: int
    parent: Optional[int]  # node index, None at the root
    action: Optional[GroundAction]  # action taken from the parent


@dataclass
class LookaheadTree:
    nodes: list[TreeNode]
    root: State
    d_max: int
    seen_size: int
    goal_found: bool
    wall_time: float
    states_capped: bool = False

    def __len__(self) -> int:
        return len(self.nodes)


def lookahead(root: State, inst: Instance, cfg: LookaheadConfig) -> LookaheadTree:
    """Grow the width-pruned BFS tree for cfg.variant from the root state."""
    start = time.perf_counter()
    g = grounder_for(inst)
    table = table_for(inst, cfg.variant, cfg.k, kernel=cfg.kernel)
    capacity = cfg.capacity if cfg.capacity is not None else DEFAULT_CAPACITY

    nodes = [TreeNode(root, 0, None, None)]
    dedup = {root}
    table.check_and_register(root)

    frontier = [0]
    depth = 0
    goal_found = False
    capped = False
    while frontier:
        if cfg.max_depth is not None and depth + 1 > cfg.max_depth:
            break
        layer: list[int] = []
        for idx in frontier:
            if capped:
                break
            state = nodes[idx].state
            for action in g.applicable(state):
                if cfg.max_states is not None and len(nodes) >= cfg.max_states:
                    capped = True
                    break
                succ = g.apply(state, action)
                if cfg.register_pruned:
                    novel = table.check_and_register(succ)
                    if not novel or succ in dedup:
                        continue
                else:
                    if not table.is_novel(succ) or succ in dedup:
                        continue
                    table.register(succ)
                nodes.append(TreeNode(succ, depth + 1, idx, action))
                dedup.add(succ)
                layer.append(len(nodes) - 1)
                if g.is_goal(succ):
                    goal_found = True
        depth += 1
        if goal_found or capped or not layer:
            break
        if cfg.variant == "caiw" and len(layer) > capacity:
            ranked = sorted(layer, key=lambda i: (-g.goal_count(nodes[i].state), i))
            frontier = sorted(ranked[:capacity])
        else:
            frontier = layer

    d_max = nodes[-1].depth if len(nodes) > 1 else 0
    return LookaheadTree(
        nodes=nodes,
        root=root,
        d_max=d_max,
        seen_size=table.seen_size,
        goal_found=goal_found,
        wall_time=time.perf_counter() - start,
        states_capped=capped,
    )


def jump_candidates(tree: LookaheadTree) -> list[int]:
    """Every node except the root, in BFS generation order."""
    return list(range(1, len(tree.nodes)))


def extract_plan(tree: LookaheadTree, node: int) -> list[GroundAction]:
    """Action sequence from the root to the node; empty for the root itself."""
    if not 0 <= node < len(tree.nodes):
        raise IndexError(f"node {node} not in tree of size {len(tree.nodes)}")
    plan: list[GroundAction] = []
    idx: Optional[int] = node
    while idx is not None and tree.nodes[idx].parent is not None:
        plan.append(tree.nodes[idx].action)
        idx = tree.nodes[idx].parent
    plan.reverse()
    return plan
