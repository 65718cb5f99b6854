"""Blocksworld PDDL fixtures for training and evaluation.

The learner generates its own instance files and hands them to the solver
CLI; this module owns that text.  Atoms are (predicate, object...) tuples,
matching records.py.
"""

from __future__ import annotations

import random
from typing import Iterable, Sequence

from .records import Atom

DOMAIN = """
(define (domain blocksworld)
  (:requirements :strips)
  (:predicates (on ?x ?y) (ontable ?x) (clear ?x) (handempty) (holding ?x))
  (:action pick-up
    :parameters (?x)
    :precondition (and (clear ?x) (ontable ?x) (handempty))
    :effect (and (holding ?x) (not (clear ?x)) (not (ontable ?x)) (not (handempty))))
  (:action put-down
    :parameters (?x)
    :precondition (holding ?x)
    :effect (and (clear ?x) (ontable ?x) (handempty) (not (holding ?x))))
  (:action stack
    :parameters (?x ?y)
    :precondition (and (holding ?x) (clear ?y))
    :effect (and (on ?x ?y) (clear ?x) (handempty) (not (holding ?x)) (not (clear ?y))))
  (:action unstack
    :parameters (?x ?y)
    :precondition (and (on ?x ?y) (clear ?x) (handempty))
    :effect (and (holding ?x) (clear ?y) (not (on ?x ?y)) (not (clear ?x)) (not (handempty))))
)
"""


def stacks_atoms(stacks: Sequence[Sequence[str]]) -> list[Atom]:
    """Ground atoms of a table of stacks (each listed bottom to top)."""
    atoms: list[Atom] = [("handempty",)]
    for stack in stacks:
        atoms.append(("ontable", stack[0]))
        atoms.append(("clear", stack[-1]))
        for below, above in zip(stack, stack[1:]):
            atoms.append(("on", above, below))
    return atoms


def goal_atoms(stacks: Sequence[Sequence[str]]) -> list[Atom]:
    """Goal as on-relations only, leaving table positions free."""
    atoms: list[Atom] = []
    for stack in stacks:
        for below, above in zip(stack, stack[1:]):
            atoms.append(("on", above, below))
    return atoms


def instance_text(
    name: str,
    objects: Iterable[str],
    init: Iterable[Atom],
    goal: Iterable[Atom],
) -> str:
    def fmt(atoms):
        return " ".join("(" + " ".join(a) + ")" for a in sorted(atoms))

    return (
        f"(define (problem {name})\n  (:domain blocksworld)\n"
        f"  (:objects {' '.join(sorted(objects))})\n"
        f"  (:init {fmt(init)})\n"
        f"  (:goal (and {fmt(goal)})))"
    )


def random_stacks(blocks: Sequence[str], rng: random.Random) -> list[list[str]]:
    order = list(blocks)
    rng.shuffle(order)
    stacks: list[list[str]] = []
    for b in order:
        if stacks and rng.random() < 0.6:
            rng.choice(stacks).append(b)
        else:
            stacks.append([b])
    return stacks


def random_instance(n_blocks: int, rng: random.Random, name: str) -> tuple[str, frozenset[Atom]]:
    """Instance text plus its goal; the goal is never already satisfied and
    never empty (single-stack inits get re-rolled goals until they differ)."""
    blocks = [f"b{i}" for i in range(1, n_blocks + 1)]
    init_stacks = random_stacks(blocks, rng)
    init = frozenset(stacks_atoms(init_stacks))
    while True:
        goal = frozenset(goal_atoms(random_stacks(blocks, rng)))
        if goal and not goal <= init:
            break
    return instance_text(name, blocks, stacks_atoms(init_stacks), goal), goal


def two_block_initial_states() -> list[list[Atom]]:
    """Every reachable two-block state (a, b)."""
    return [
        [("handempty",), ("ontable", "a"), ("ontable", "b"), ("clear", "a"), ("clear", "b")],
        [("handempty",), ("ontable", "b"), ("on", "a", "b"), ("clear", "a")],
        [("handempty",), ("ontable", "a"), ("on", "b", "a"), ("clear", "b")],
        [("holding", "a"), ("ontable", "b"), ("clear", "b")],
        [("holding", "b"), ("ontable", "a"), ("clear", "a")],
    ]
