"""Greedy policy execution over scored candidates, plus reference scorers.

A decision point offers candidate transitions: primitive successors in the
flat modes, lookahead-tree states in jump mode.  Candidates whose state was
already visited this episode are dropped before scoring; the survivor with
the highest Q-value wins, ties broken by lowest index.  Solved episodes are
verified by replaying the concatenated plan from the initial state.
"""

from __future__ import annotations

import random
import shlex
import socket
import subprocess
import time
from collections import deque
from dataclasses import dataclass, field
from typing import Optional, Protocol, Sequence

from .encode import (
    encode_aa,
    encode_ad,
    encode_external,
    encode_internal,
    encode_internal_delta,
)
from .ground import GroundAction, State, grounder_for
from .lookahead import (
    LookaheadConfig,
    LookaheadTree,
    TreeNode,
    extract_plan,
    jump_candidates,
    lookahead,
)
from .pddl import Instance
from .protocol import ProtocolError, read_message, validate_record, write_message

MODES = ("flat_aa", "flat_ad", "iw_jump")
JUMP_ENCODINGS = ("ad", "ext", "int", "intd")

DEFAULT_MAX_CHOICES = 1000
DEFAULT_STEP_CAP = 1_000_000
DEFAULT_FLAT_TIMEOUT = 15 * 60.0
DEFAULT_JUMP_TIMEOUT = 60 * 60.0

ORACLE_STATE_LIMIT = 100_000


class StateSpaceTooLargeError(Exception):
    pass


@dataclass
class ScoreRequest:
    """One decision point: wire records plus executor-side candidate context."""

    records: list[dict]
    values_per_record: list[int]
    states: list[State]
    current: State
    encoding: str


class Scorer(Protocol):
    def score(self, request: ScoreRequest) -> list[float]: ...


class ZeroScorer:
    """Uniform scores; with lowest-index tie-breaking this is first-candidate."""

    def score(self, request: ScoreRequest) -> list[float]:
        return [0.0] * len(request.states)


class OracleScorer:
    """Exact negated goal distance over the fully explored state space.

    Dead states (no path to a goal) score negative infinity.
    """

    def __init__(self, inst: Instance, state_limit: int = ORACLE_STATE_LIMIT):
        self.inst = inst
        g = grounder_for(inst)
        index: dict[State, int] = {g.initial_state: 0}
        states = [g.initial_state]
        edges_rev: list[list[int]] = [[]]
        goals = []
        queue = deque([0])
        while queue:
            i = queue.popleft()
            s = states[i]
            if g.is_goal(s):
                goals.append(i)
            for a in g.applicable(s):
                succ = g.apply(s, a)
                j = index.get(succ)
                if j is None:
                    if len(states) >= state_limit:
                        raise StateSpaceTooLargeError(
                            f"more than {state_limit} reachable states"
                        )
                    j = len(states)
                    index[succ] = j
                    states.append(succ)
                    edges_rev.append([])
                    queue.append(j)
                edges_rev[j].append(i)
        dist = [float("inf")] * len(states)
        queue = deque()
        for i in goals:
            dist[i] = 0
            queue.append(i)
        while queue:
            j = queue.popleft()
            for i in edges_rev[j]:
                if dist[i] == float("inf"):
                    dist[i] = dist[j] + 1
                    queue.append(i)
        self._dist = {s: d for s, d in zip(states, dist)}

    def distance(self, s: State) -> float:
        return self._dist.get(s, float("inf"))

    def score(self, request: ScoreRequest) -> list[float]:
        return [-self.distance(s) for s in request.states]


def oracle_scorer(inst: Instance, state_limit: int = ORACLE_STATE_LIMIT) -> OracleScorer:
    return OracleScorer(inst, state_limit)


def zero_scorer() -> ZeroScorer:
    return ZeroScorer()


class _StreamScorer:
    """Shared send/receive loop over a framed byte stream."""

    def _streams(self):
        raise NotImplementedError

    def score(self, request: ScoreRequest) -> list[float]:
        wstream, rstream = self._streams()
        values: list[float] = []
        for rec, expect in zip(request.records, request.values_per_record):
            write_message(wstream, rec)
            resp = read_message(rstream)
            if resp is None:
                raise ProtocolError("scorer closed the stream mid-request")
            validate_record(resp)
            if resp["kind"] == "error":
                raise ProtocolError(f"scorer error: {resp['message']}")
            got = resp["values"]
            if len(got) != expect:
                raise ProtocolError(
                    f"scorer returned {len(got)} values, expected {expect}"
                )
            values.extend(float(v) for v in got)
        return values


class SubprocessScorer(_StreamScorer):
    """Child process speaking the framed graph/q protocol on stdio."""

    def __init__(self, command: str):
        self._proc = subprocess.Popen(
            shlex.split(command),
            stdin=subprocess.PIPE,
            stdout=subprocess.PIPE,
        )

    def _streams(self):
        if self._proc.poll() is not None:
            raise ProtocolError("scorer process exited")
        return self._proc.stdin, self._proc.stdout

    def close(self) -> None:
        if self._proc.stdin:
            self._proc.stdin.close()
        self._proc.wait(timeout=10)

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


class SocketScorer(_StreamScorer):
    """Local socket speaking the same framed protocol."""

    def __init__(self, host: str, port: int):
        self._sock = socket.create_connection((host, port))
        self._file = self._sock.makefile("rwb")

    def _streams(self):
        return self._file, self._file

    def close(self) -> None:
        self._file.close()
        self._sock.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


# ---------------------------------------------------------------------------
# episode execution


@dataclass
class EpisodeLimits:
    max_choices: int = DEFAULT_MAX_CHOICES
    step_cap: Optional[int] = None  # defaults per mode when None
    timeout: Optional[float] = None


@dataclass
class EpisodeResult:
    solved: bool
    choices: int
    plan: list[GroundAction]
    wall_time: float
    failure_reason: Optional[str] = None  # choice_limit | timeout | dead_end | step_cap


@dataclass
class _Candidate:
    state: State
    plan: list[GroundAction]


def _flat_candidates(s: State, inst: Instance, mode: str):
    g = grounder_for(inst)
    actions = g.applicable(s)
    if mode == "flat_aa":
        cands = [_Candidate(g.apply(s, a), [a]) for a in actions]
        graph = encode_aa(s, actions, inst)
        return cands, graph
    # flat_ad encodes the primitive successors as a depth-one tree, which
    # must not hold two equal states; first action wins
    seen: dict[State, int] = {}
    nodes = [TreeNode(s, 0, None, None)]
    cands = []
    for a in actions:
        succ = g.apply(s, a)
        if succ == s or succ in seen:
            continue
        seen[succ] = len(nodes)
        nodes.append(TreeNode(succ, 1, 0, a))
        cands.append(_Candidate(succ, [a]))
    tree = LookaheadTree(
        nodes=nodes,
        root=s,
        d_max=1 if len(nodes) > 1 else 0,
        seen_size=0,
        goal_found=any(g.is_goal(c.state) for c in cands),
        wall_time=0.0,
    )
    return cands, encode_ad(tree, inst)


def _build_request(
    s: State,
    inst: Instance,
    mode: str,
    encoding: str,
    cfg: LookaheadConfig,
    visited: set[State],
):
    """Returns (survivor candidates, ScoreRequest or None when no survivors)."""
    if mode in ("flat_aa", "flat_ad"):
        cands, graph = _flat_candidates(s, inst, mode)
        keep = [i for i, c in enumerate(cands) if c.state not in visited]
        if not keep:
            return [], None
        rec = graph.to_record()
        rec["candidates"] = [graph.candidates[i] for i in keep]
        survivors = [cands[i] for i in keep]
        request = ScoreRequest(
            records=[rec],
            values_per_record=[len(keep)],
            states=[c.state for c in survivors],
            current=s,
            encoding=encoding,
        )
        return survivors, request

    tree = lookahead(s, inst, cfg)
    idxs = [i for i in jump_candidates(tree) if tree.nodes[i].state not in visited]
    if not idxs:
        return [], None
    survivors = [_Candidate(tree.nodes[i].state, extract_plan(tree, i)) for i in idxs]
    if encoding == "ad":
        graph = encode_ad(tree, inst)
        rec = graph.to_record()
        # graph candidates are aligned with tree node order 1..n
        rec["candidates"] = [graph.candidates[i - 1] for i in idxs]
        records, per_record = [rec], [len(idxs)]
    else:
        encoder = {
            "ext": encode_external,
            "int": encode_internal,
            "intd": encode_internal_delta,
        }[encoding]
        records = [encoder(s, c.state, inst).to_record() for c in survivors]
        per_record = [1] * len(records)
    request = ScoreRequest(
        records=records,
        values_per_record=per_record,
        states=[c.state for c in survivors],
        current=s,
        encoding=encoding,
    )
    return survivors, request


def run_episode(
    inst: Instance,
    scorer: Scorer,
    mode: str = "iw_jump",
    lookahead_cfg: Optional[LookaheadConfig] = None,
    limits: Optional[EpisodeLimits] = None,
    encoding: Optional[str] = None,
    verify: bool = True,
) -> EpisodeResult:
    if mode not in MODES:
        raise ValueError(f"unknown mode '{mode}'")
    if mode == "flat_aa":
        if encoding not in (None, "aa"):
            raise ValueError("flat_aa scores actions; encoding is fixed to aa")
        encoding = "aa"
    elif mode == "flat_ad":
        if encoding not in (None, "ad"):
            raise ValueError("flat_ad is fixed to the ad encoding")
        encoding = "ad"
    else:
        encoding = encoding or "ad"
        if encoding not in JUMP_ENCODINGS:
            raise ValueError(f"iw_jump supports encodings {JUMP_ENCODINGS}")

    cfg = lookahead_cfg or LookaheadConfig(variant="aiw")
    limits = limits or EpisodeLimits()
    step_cap = limits.step_cap
    if step_cap is None:
        step_cap = DEFAULT_STEP_CAP if mode == "iw_jump" else limits.max_choices
    timeout = limits.timeout
    if timeout is None:
        timeout = DEFAULT_JUMP_TIMEOUT if mode == "iw_jump" else DEFAULT_FLAT_TIMEOUT

    g = grounder_for(inst)
    start = time.perf_counter()
    current = g.initial_state
    visited = {current}
    plan: list[GroundAction] = []
    choices = 0
    failure = None

    while True:
        if g.is_goal(current):
            break
        if choices >= limits.max_choices:
            failure = "choice_limit"
            break
        if time.perf_counter() - start > timeout:
            failure = "timeout"
            break
        survivors, request = _build_request(current, inst, mode, encoding, cfg, visited)
        if not survivors:
            failure = "dead_end"
            break
        values = scorer.score(request)
        best = max(range(len(survivors)), key=lambda i: (values[i], -i))
        chosen = survivors[best]
        if len(plan) + len(chosen.plan) > step_cap:
            failure = "step_cap"
            break
        plan.extend(chosen.plan)
        current = chosen.state
        visited.add(current)
        choices += 1

    solved = failure is None
    if solved and verify:
        replay = g.initial_state
        for a in plan:
            replay = g.apply(replay, a)
        if not g.is_goal(replay):
            raise AssertionError("solved episode's plan does not replay to a goal")
    return EpisodeResult(
        solved=solved,
        choices=choices,
        plan=plan,
        wall_time=time.perf_counter() - start,
        failure_reason=failure,
    )


def branching_factor(inst: Instance, walk_len: int = 10, seed: int = 0) -> float:
    """Average applicable-action count over a seeded uniform random walk,
    counting the initial state; the walk stops early in a dead end."""
    rng = random.Random(seed)
    g = grounder_for(inst)
    s = g.initial_state
    actions = g.applicable(s)
    counts = [len(actions)]
    for _ in range(walk_len):
        if not actions:
            break
        s = g.apply(s, actions[rng.randrange(len(actions))])
        actions = g.applicable(s)
        counts.append(len(actions))
    return sum(counts) / len(counts)
