import socket
import sys
import threading

import pytest

from widthjump import parse_domain, parse_instance, toys
from widthjump.ground import State, grounder_for
from widthjump.lookahead import LookaheadConfig
from widthjump.policy import (
    EpisodeLimits,
    OracleScorer,
    ScoreRequest,
    SocketScorer,
    StateSpaceTooLargeError,
    SubprocessScorer,
    ZeroScorer,
    branching_factor,
    oracle_scorer,
    run_episode,
    zero_scorer,
)
from widthjump.protocol import ProtocolError, read_message, write_message

from reference import bfs_distances

STUB = f"{sys.executable} tests/stub_scorer.py"


def _instances():
    bw = parse_domain(toys.BLOCKSWORLD_DOMAIN)
    grip = parse_domain(toys.GRIPPER_DOMAIN)
    deliv = parse_domain(toys.DELIVERY_DOMAIN)
    span = parse_domain(toys.SPANNER_DOMAIN)
    return {
        "bw2": parse_instance(
            toys.blocksworld_instance([["a"], ["b"]], [["b", "a"]], name="bw2"), bw
        ),
        "bw3": parse_instance(
            toys.blocksworld_instance([["a", "b"], ["c"]], [["c", "b", "a"]], name="bw3"), bw
        ),
        "gripper2": parse_instance(toys.gripper_instance(2), grip),
        "delivery1": parse_instance(toys.delivery_toy(1), deliv),
        "delivery2": parse_instance(toys.delivery_toy(2), deliv),
        "spanner": parse_instance(toys.spanner_instance(3, [1, 2], 1), span),
        "spanner_deg": parse_instance(toys.spanner_degenerate(), span),
        "deadend": parse_instance(
            toys.DEADEND_INSTANCE, parse_domain(toys.DEADEND_DOMAIN)
        ),
        "fanout4": parse_instance(
            toys.fanout_instance(4), parse_domain(toys.fanout_domain(4))
        ),
    }


INSTANCES = _instances()


class RecordingScorer:
    """Zero scores, but remembers every request and checks visited exclusion."""

    def __init__(self, inst):
        g = grounder_for(inst)
        self.visited = {g.initial_state}
        self.requests: list[ScoreRequest] = []

    def score(self, request):
        self.requests.append(request)
        for s in request.states:
            assert s not in self.visited, "scored a candidate already visited"
        chosen = request.states[0]  # zero scores + lowest-index tie break
        self.visited.add(chosen)
        return [0.0] * len(request.states)


class TestOracleScorer:
    @pytest.mark.parametrize("name", ["bw2", "bw3", "gripper2", "delivery1", "spanner"])
    def test_distances_match_reference(self, name):
        inst = INSTANCES[name]
        oracle = OracleScorer(inst)
        g = grounder_for(inst)
        ref = bfs_distances(inst)
        assert ref
        for atoms, want in ref.items():
            s = State([g.registry.intern(a[0], a[1:]) for a in atoms])
            assert oracle.distance(s) == want

    def test_dead_state_scores_minus_inf(self):
        oracle = OracleScorer(INSTANCES["deadend"])
        g = grounder_for(INSTANCES["deadend"])
        req = ScoreRequest(
            records=[], values_per_record=[], states=[g.initial_state],
            current=g.initial_state, encoding="ad",
        )
        assert oracle.score(req) == [float("-inf")]

    def test_state_limit(self):
        with pytest.raises(StateSpaceTooLargeError):
            OracleScorer(INSTANCES["gripper2"], state_limit=3)

    def test_q_steps_along_optimal_plan(self):
        # following any optimal action drops the distance by exactly one
        inst = INSTANCES["bw3"]
        oracle = OracleScorer(inst)
        g = grounder_for(inst)
        s = g.initial_state
        d = oracle.distance(s)
        assert d > 0 and d != float("inf")
        while not g.is_goal(s):
            succs = [g.apply(s, a) for a in g.applicable(s)]
            best = min(succs, key=oracle.distance)
            assert oracle.distance(best) == oracle.distance(s) - 1
            s = best

    def test_factory_helpers(self):
        assert isinstance(oracle_scorer(INSTANCES["bw2"]), OracleScorer)
        assert isinstance(zero_scorer(), ZeroScorer)


class TestFlatModes:
    @pytest.mark.parametrize("name", ["bw2", "bw3", "gripper2", "delivery1", "spanner"])
    @pytest.mark.parametrize("mode", ["flat_aa", "flat_ad"])
    def test_oracle_solves_optimally(self, name, mode):
        inst = INSTANCES[name]
        oracle = OracleScorer(inst)
        g = grounder_for(inst)
        optimal = oracle.distance(g.initial_state)
        res = run_episode(inst, oracle, mode=mode)
        assert res.solved and res.failure_reason is None
        assert res.choices == optimal
        assert len(res.plan) == optimal

    def test_zero_scorer_exclusion_prevents_backtracking(self):
        # undoing the pick-up would revisit the start state, so the only
        # surviving candidate is the goal move
        inst = INSTANCES["bw2"]
        res = run_episode(inst, ZeroScorer(), mode="flat_aa")
        assert res.solved
        assert [(a.name, a.args) for a in res.plan] == [
            ("pick-up", ("a",)),
            ("stack", ("a", "b")),
        ]

    def test_flat_ad_dedups_candidates(self):
        inst = INSTANCES["gripper2"]
        rec = RecordingScorer(inst)
        run_episode(inst, rec, mode="flat_ad", limits=EpisodeLimits(max_choices=5))
        for req in rec.requests:
            assert len(set(req.states)) == len(req.states)
            assert req.current not in req.states

    def test_flat_aa_request_shape(self):
        inst = INSTANCES["bw3"]
        rec = RecordingScorer(inst)
        run_episode(inst, rec, mode="flat_aa", limits=EpisodeLimits(max_choices=3))
        for req in rec.requests:
            assert req.encoding == "aa"
            assert len(req.records) == 1
            assert req.values_per_record == [len(req.states)]
            assert req.records[0]["meta"]["encoding"] == "aa"
            assert len(req.records[0]["candidates"]) == len(req.states)


class TestJumpMode:
    def test_delivery_two_jumps_per_package(self):
        for name, jumps in (("delivery1", 2), ("delivery2", 4)):
            inst = INSTANCES[name]
            res = run_episode(inst, OracleScorer(inst), mode="iw_jump")
            assert res.solved, name
            assert res.choices == jumps, name

    def test_degenerate_spanner_baiw_dead_ends_aiw_solves(self):
        inst = INSTANCES["spanner_deg"]
        oracle = OracleScorer(inst)
        res = run_episode(
            inst, oracle, mode="iw_jump",
            lookahead_cfg=LookaheadConfig(variant="baiw"),
        )
        assert not res.solved
        assert res.failure_reason == "dead_end"
        assert res.choices == 0
        res = run_episode(
            inst, oracle, mode="iw_jump",
            lookahead_cfg=LookaheadConfig(variant="aiw"),
        )
        assert res.solved
        assert res.choices == 2  # jump to the picked-up state, then finish

    @pytest.mark.parametrize("encoding", ["ad", "ext", "int", "intd"])
    def test_encodings_agree_on_trajectory(self, encoding):
        # scores come from executor-side states, so the encoding choice must
        # not change the chosen path, only the wire records
        inst = INSTANCES["delivery1"]
        res = run_episode(inst, OracleScorer(inst), mode="iw_jump", encoding=encoding)
        assert res.solved
        assert res.choices == 2

    def test_request_shapes_per_encoding(self):
        inst = INSTANCES["delivery1"]

        class Shapes(RecordingScorer):
            pass

        for encoding, records_per_call in (("ad", 1), ("ext", None), ("int", None), ("intd", None)):
            rec = Shapes(inst)
            run_episode(
                inst, rec, mode="iw_jump", encoding=encoding,
                limits=EpisodeLimits(max_choices=2),
            )
            assert rec.requests
            for req in rec.requests:
                if encoding == "ad":
                    assert len(req.records) == 1
                    assert req.values_per_record == [len(req.states)]
                else:
                    assert len(req.records) == len(req.states)
                    assert req.values_per_record == [1] * len(req.states)
                    kind = "graph_pair" if encoding == "ext" else "graph"
                    assert all(r["kind"] == kind for r in req.records)

    def test_jump_candidates_exclude_visited(self):
        inst = INSTANCES["gripper2"]
        rec = RecordingScorer(inst)
        run_episode(inst, rec, mode="iw_jump", limits=EpisodeLimits(max_choices=4))


class TestFailureReasons:
    def test_dead_end_at_root(self):
        inst = INSTANCES["deadend"]
        for mode in ("flat_aa", "flat_ad", "iw_jump"):
            res = run_episode(inst, ZeroScorer(), mode=mode)
            assert not res.solved
            assert res.failure_reason == "dead_end"
            assert res.choices == 0 and res.plan == []

    def test_choice_limit(self):
        inst = INSTANCES["bw3"]
        res = run_episode(
            inst, OracleScorer(inst), mode="flat_aa",
            limits=EpisodeLimits(max_choices=1),
        )
        assert not res.solved
        assert res.failure_reason == "choice_limit"
        assert res.choices == 1

    def test_timeout(self):
        inst = INSTANCES["bw3"]
        res = run_episode(
            inst, ZeroScorer(), mode="flat_aa",
            limits=EpisodeLimits(timeout=0.0),
        )
        assert not res.solved
        assert res.failure_reason == "timeout"
        assert res.choices == 0

    def test_step_cap(self):
        # the first delivery jump needs two primitive actions (drive + pick)
        inst = INSTANCES["delivery1"]
        res = run_episode(
            inst, OracleScorer(inst), mode="iw_jump",
            limits=EpisodeLimits(step_cap=1),
        )
        assert not res.solved
        assert res.failure_reason == "step_cap"
        assert res.plan == []

    def test_goal_at_root_zero_choices(self):
        bw = parse_domain(toys.BLOCKSWORLD_DOMAIN)
        inst = parse_instance(
            toys.blocksworld_instance([["b", "a"]], [["b", "a"]], name="done"), bw
        )
        for mode in ("flat_aa", "flat_ad", "iw_jump"):
            res = run_episode(inst, ZeroScorer(), mode=mode)
            assert res.solved and res.choices == 0 and res.plan == []

    def test_mode_and_encoding_validation(self):
        inst = INSTANCES["bw2"]
        with pytest.raises(ValueError, match="unknown mode"):
            run_episode(inst, ZeroScorer(), mode="dfs")
        with pytest.raises(ValueError, match="fixed to aa"):
            run_episode(inst, ZeroScorer(), mode="flat_aa", encoding="ad")
        with pytest.raises(ValueError, match="fixed to the ad"):
            run_episode(inst, ZeroScorer(), mode="flat_ad", encoding="aa")
        with pytest.raises(ValueError, match="iw_jump supports"):
            run_episode(inst, ZeroScorer(), mode="iw_jump", encoding="aa")


class TestStreamScorers:
    def test_subprocess_zeros_runs_episode(self):
        inst = INSTANCES["bw2"]
        with SubprocessScorer(STUB) as scorer:
            res = run_episode(inst, scorer, mode="flat_aa")
        assert res.solved  # zeros + visited exclusion solve this toy

    def test_subprocess_index_mode_prefers_last(self):
        # stub scores candidate i with value i, so the executor picks the
        # highest-index candidate each time
        inst = INSTANCES["bw2"]
        with SubprocessScorer(f"{STUB} --mode index") as scorer:
            res = run_episode(inst, scorer, mode="flat_aa",
                              limits=EpisodeLimits(max_choices=2))
        assert [(a.name, a.args) for a in res.plan][0] == ("pick-up", ("b",))

    def test_subprocess_wrong_count_raises(self):
        inst = INSTANCES["bw2"]
        with SubprocessScorer(f"{STUB} --mode wrong-count") as scorer:
            with pytest.raises(ProtocolError, match="expected"):
                run_episode(inst, scorer, mode="flat_aa")

    def test_subprocess_error_record_raises(self):
        inst = INSTANCES["bw2"]
        with SubprocessScorer(f"{STUB} --mode error") as scorer:
            with pytest.raises(ProtocolError, match="stub failure"):
                run_episode(inst, scorer, mode="flat_aa")

    def test_socket_scorer(self):
        server = socket.create_server(("127.0.0.1", 0))
        port = server.getsockname()[1]

        def serve():
            conn, _ = server.accept()
            f = conn.makefile("rwb")
            while True:
                rec = read_message(f)
                if rec is None:
                    break
                n = len(rec.get("candidates", [0])) or 1
                write_message(f, {"v": 1, "kind": "q", "values": [0.0] * n})
            conn.close()

        t = threading.Thread(target=serve, daemon=True)
        t.start()
        inst = INSTANCES["bw2"]
        with SocketScorer("127.0.0.1", port) as scorer:
            res = run_episode(inst, scorer, mode="flat_aa")
        assert res.solved
        server.close()


class TestBranchingFactor:
    def test_constant_fanout_is_exact(self):
        assert branching_factor(INSTANCES["fanout4"]) == 4.0

    def test_dead_end_is_zero(self):
        assert branching_factor(INSTANCES["deadend"]) == 0.0

    def test_seed_determinism(self):
        a = branching_factor(INSTANCES["gripper2"], seed=7)
        b = branching_factor(INSTANCES["gripper2"], seed=7)
        assert a == b

    def test_counts_match_manual_walk(self):
        import random as _random

        inst = INSTANCES["gripper2"]
        got = branching_factor(inst, walk_len=10, seed=3)
        rng = _random.Random(3)
        g = grounder_for(inst)
        s = g.initial_state
        actions = g.applicable(s)
        counts = [len(actions)]
        for _ in range(10):
            if not actions:
                break
            s = g.apply(s, actions[rng.randrange(len(actions))])
            actions = g.applicable(s)
            counts.append(len(actions))
        assert got == sum(counts) / len(counts)
