"""Small PDDL domain/instance generators used by tests, benchmarks, and docs.

Everything here returns PDDL text so the generators also double as fixtures
for the file-based CLI.
"""

from __future__ import annotations

import random
from typing import Iterable, Sequence

BLOCKSWORLD_DOMAIN = """
(define (domain blocksworld)
  (:requirements :strips)
  (:predicates (on ?x ?y) (ontable ?x) (clear ?x) (handempty) (holding ?x))
  (:action pick-up
    :parameters (?x)
    :precondition (and (clear ?x) (ontable ?x) (handempty))
    :effect (and (holding ?x) (not (ontable ?x)) (not (clear ?x)) (not (handempty))))
  (:action put-down
    :parameters (?x)
    :precondition (and (holding ?x))
    :effect (and (ontable ?x) (clear ?x) (handempty) (not (holding ?x))))
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

GRIPPER_DOMAIN = """
(define (domain gripper)
  (:requirements :strips)
  (:predicates (room ?r) (ball ?b) (gripper ?g) (at-robby ?r) (at ?b ?r)
               (free ?g) (carry ?b ?g))
  (:action move
    :parameters (?from ?to)
    :precondition (and (room ?from) (room ?to) (at-robby ?from))
    :effect (and (at-robby ?to) (not (at-robby ?from))))
  (:action pick
    :parameters (?b ?r ?g)
    :precondition (and (ball ?b) (room ?r) (gripper ?g) (at ?b ?r) (at-robby ?r) (free ?g))
    :effect (and (carry ?b ?g) (not (at ?b ?r)) (not (free ?g))))
  (:action drop
    :parameters (?b ?r ?g)
    :precondition (and (ball ?b) (room ?r) (gripper ?g) (carry ?b ?g) (at-robby ?r))
    :effect (and (at ?b ?r) (free ?g) (not (carry ?b ?g))))
)
"""

DELIVERY_DOMAIN = """
(define (domain delivery)
  (:requirements :strips :typing)
  (:types location locatable - object package truck - locatable)
  (:predicates (at ?x - locatable ?l - location)
               (adjacent ?a - location ?b - location)
               (in ?p - package ?t - truck)
               (empty ?t - truck))
  (:action drive
    :parameters (?t - truck ?from - location ?to - location)
    :precondition (and (at ?t ?from) (adjacent ?from ?to))
    :effect (and (at ?t ?to) (not (at ?t ?from))))
  (:action pick
    :parameters (?p - package ?l - location ?t - truck)
    :precondition (and (at ?p ?l) (at ?t ?l) (empty ?t))
    :effect (and (in ?p ?t) (not (at ?p ?l)) (not (empty ?t))))
  (:action drop
    :parameters (?p - package ?l - location ?t - truck)
    :precondition (and (in ?p ?t) (at ?t ?l))
    :effect (and (at ?p ?l) (empty ?t) (not (in ?p ?t))))
)
"""

SPANNER_DOMAIN = """
(define (domain spanner)
  (:requirements :strips :typing)
  (:types location locatable - object man nut spanner - locatable)
  (:predicates (at ?x - locatable ?l - location)
               (carrying ?m - man ?s - spanner)
               (useable ?s - spanner)
               (link ?a - location ?b - location)
               (tightened ?n - nut)
               (loose ?n - nut))
  (:action walk
    :parameters (?start - location ?end - location ?m - man)
    :precondition (and (at ?m ?start) (link ?start ?end))
    :effect (and (at ?m ?end) (not (at ?m ?start))))
  (:action pickup_spanner
    :parameters (?l - location ?s - spanner ?m - man)
    :precondition (and (at ?m ?l) (at ?s ?l))
    :effect (and (carrying ?m ?s) (not (at ?s ?l))))
  (:action tighten_nut
    :parameters (?l - location ?s - spanner ?m - man ?n - nut)
    :precondition (and (at ?m ?l) (at ?n ?l) (carrying ?m ?s) (useable ?s) (loose ?n))
    :effect (and (tightened ?n) (not (useable ?s)) (not (loose ?n))))
)
"""

# constant-branching micro domain: the b marker-setting actions stay
# applicable in every reachable state, so |A[s]| = b everywhere
def fanout_domain(b: int = 4) -> str:
    preds = " ".join(f"(m{i})" for i in range(1, b + 1))
    acts = "\n".join(
        f"  (:action op{i} :parameters () :precondition (and (go)) :effect (and (m{i})))"
        for i in range(1, b + 1)
    )
    return f"(define (domain fanout{b})\n  (:requirements :strips)\n  (:predicates (go) {preds})\n{acts}\n)"


def fanout_instance(b: int = 4) -> str:
    return (
        f"(define (problem fanout{b}-1) (:domain fanout{b}) "
        f"(:init (go)) (:goal (and (m1))))"
    )


DEADEND_DOMAIN = """
(define (domain deadend)
  (:requirements :strips)
  (:predicates (p) (q))
  (:action a :parameters () :precondition (and (p)) :effect (and (q)))
)
"""

DEADEND_INSTANCE = """
(define (problem deadend-1) (:domain deadend) (:init (q)) (:goal (and (p))))
"""

# three root successors with goal-atom counts 2, 1, 2; each has a private
# marker reachable one step deeper, so capacity selection is observable
TRIAGE_DOMAIN = """
(define (domain triage)
  (:requirements :strips)
  (:predicates (start) (ga1) (ga2) (gb1) (gc1) (gc2) (ma) (mb) (mc))
  (:action acta :parameters () :precondition (and (start)) :effect (and (ga1) (ga2)))
  (:action actb :parameters () :precondition (and (start)) :effect (and (gb1)))
  (:action actc :parameters () :precondition (and (start)) :effect (and (gc1) (gc2)))
  (:action acta2 :parameters () :precondition (and (ga1)) :effect (and (ma)))
  (:action actb2 :parameters () :precondition (and (gb1)) :effect (and (mb)))
  (:action actc2 :parameters () :precondition (and (gc1)) :effect (and (mc)))
)
"""

TRIAGE_INSTANCE = """
(define (problem triage-1)
  (:domain triage)
  (:init (start))
  (:goal (and (ga1) (ga2) (gb1) (gc1) (gc2))))
"""


def blocksworld_instance(
    init_stacks: Sequence[Sequence[str]],
    goal_stacks: Sequence[Sequence[str]],
    name: str = "bw",
    goal_on_table: bool = False,
) -> str:
    """Stacks are listed bottom-up; goals use on atoms (plus ontable if asked)."""
    blocks = sorted(b for st in init_stacks for b in st)
    init = ["(handempty)"]
    for st in init_stacks:
        init.append(f"(ontable {st[0]})")
        for below, above in zip(st, st[1:]):
            init.append(f"(on {above} {below})")
        init.append(f"(clear {st[-1]})")
    goal = []
    for st in goal_stacks:
        if goal_on_table:
            goal.append(f"(ontable {st[0]})")
        for below, above in zip(st, st[1:]):
            goal.append(f"(on {above} {below})")
    return (
        f"(define (problem {name})\n  (:domain blocksworld)\n"
        f"  (:objects {' '.join(blocks)})\n"
        f"  (:init {' '.join(init)})\n"
        f"  (:goal (and {' '.join(goal)})))"
    )


def random_stacks(blocks: Sequence[str], rng: random.Random) -> list[list[str]]:
    stacks: list[list[str]] = []
    for b in blocks:
        i = rng.randrange(len(stacks) + 1)
        if i == len(stacks):
            stacks.append([b])
        else:
            stacks[i].append(b)
    return stacks


def random_blocksworld(n_blocks: int, rng: random.Random, name: str = "bw-rand") -> str:
    blocks = [f"b{i}" for i in range(1, n_blocks + 1)]
    init = random_stacks(blocks, rng)
    while True:
        goal = random_stacks(blocks, rng)
        if goal != init:
            break
    return blocksworld_instance(init, goal, name=name)


def gripper_instance(n_balls: int, name: str = "gripper") -> str:
    balls = [f"ball{i}" for i in range(1, n_balls + 1)]
    init = ["(room rooma)", "(room roomb)", "(gripper left)", "(gripper right)",
            "(free left)", "(free right)", "(at-robby rooma)"]
    init += [f"(ball {b})" for b in balls]
    init += [f"(at {b} rooma)" for b in balls]
    goal = [f"(at {b} roomb)" for b in balls]
    return (
        f"(define (problem {name}-{n_balls})\n  (:domain gripper)\n"
        f"  (:objects rooma roomb left right {' '.join(balls)})\n"
        f"  (:init {' '.join(init)})\n"
        f"  (:goal (and {' '.join(goal)})))"
    )


def delivery_instance(
    n_cells: int,
    packages: Sequence[tuple[str, int, int]],
    truck_cell: int = 1,
    name: str = "delivery",
) -> str:
    """Corridor of cells c1..cN with a single truck; packages are
    (name, start cell, goal cell) triples, cells indexed from 1."""
    cells = [f"c{i}" for i in range(1, n_cells + 1)]
    objs = [f"{c} - location" for c in cells] + ["truck1 - truck"]
    objs += [f"{p} - package" for p, _, _ in packages]
    init = [f"(at truck1 c{truck_cell})", "(empty truck1)"]
    for a, b in zip(cells, cells[1:]):
        init.append(f"(adjacent {a} {b})")
        init.append(f"(adjacent {b} {a})")
    for p, start, _ in packages:
        init.append(f"(at {p} c{start})")
    goal = [f"(at {p} c{g})" for p, _, g in packages]
    return (
        f"(define (problem {name})\n  (:domain delivery)\n"
        f"  (:objects {' '.join(objs)})\n"
        f"  (:init {' '.join(init)})\n"
        f"  (:goal (and {' '.join(goal)})))"
    )


def delivery_toy(n_packages: int) -> str:
    """Corridor toys where each package sits at least two cells from its goal."""
    if n_packages == 1:
        return delivery_instance(5, [("p1", 2, 5)], truck_cell=1, name="delivery-1")
    if n_packages == 2:
        return delivery_instance(
            7, [("p1", 2, 5), ("p2", 6, 3)], truck_cell=1, name="delivery-2"
        )
    if n_packages == 3:
        return delivery_instance(
            9,
            [("p1", 2, 5), ("p2", 6, 3), ("p3", 8, 4)],
            truck_cell=1,
            name="delivery-3",
        )
    raise ValueError("delivery toys are defined for 1..3 packages")


def spanner_instance(
    n_locations: int,
    spanner_locs: Sequence[int],
    n_nuts: int,
    name: str = "spanner",
    man_loc: int = 0,
) -> str:
    """One-way corridor shed=l0 -> l1 -> ... -> l<n>=gate; nuts wait at the
    gate; spanner_locs gives the corridor index of each spanner."""
    locs = [f"l{i}" for i in range(n_locations + 1)]
    gate = locs[-1]
    spanners = [f"s{i}" for i in range(1, len(spanner_locs) + 1)]
    nuts = [f"n{i}" for i in range(1, n_nuts + 1)]
    objs = [f"{l} - location" for l in locs] + ["bob - man"]
    objs += [f"{s} - spanner" for s in spanners] + [f"{n} - nut" for n in nuts]
    init = [f"(at bob {locs[man_loc]})"]
    init += [f"(link {a} {b})" for a, b in zip(locs, locs[1:])]
    init += [f"(at {s} {locs[i]})" for s, i in zip(spanners, spanner_locs)]
    init += [f"(useable {s})" for s in spanners]
    init += [f"(at {n} {gate})" for n in nuts]
    init += [f"(loose {n})" for n in nuts]
    goal = [f"(tightened {n})" for n in nuts]
    return (
        f"(define (problem {name})\n  (:domain spanner)\n"
        f"  (:objects {' '.join(objs)})\n"
        f"  (:init {' '.join(init)})\n"
        f"  (:goal (and {' '.join(goal)})))"
    )


def spanner_degenerate() -> str:
    """Corridor with the spanner sitting exactly on the cell the man must
    enter first, so base-reduced movement produces nothing unseen."""
    return spanner_instance(2, [1], 1, name="spanner-degenerate")


def spanner_family(size: int) -> str:
    """Scaling family: roughly one third corridor, one third spanners,
    one third nuts, total object count "size"."""
    n_nuts = max(1, size // 3)
    n_spanners = max(1, size // 3)
    n_locs = max(2, size - n_nuts - n_spanners - 1 - 1)  # minus bob and l0
    spanner_locs = [1 + (i % n_locs) for i in range(n_spanners)]
    return spanner_instance(n_locs, spanner_locs, n_nuts, name=f"spanner-{size}")
