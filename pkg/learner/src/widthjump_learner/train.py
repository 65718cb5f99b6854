"""Q-learning on planner decision points.

Each trajectory is one ``widthjump solve`` run.  The trainer serves scores
over TCP: during collection it samples a candidate from the Boltzmann
distribution of its own Q values and returns one-hot pseudo-scores (the
executor picks the argmax, i.e. exactly the sampled candidate), logging
every (graph record, choice) pair.  Decisions become one-step transitions
with reward -1; failed trajectories are additionally relabeled against the
goal fragment they did reach.  The network is fit with one-step TD targets
from the online network plus a depth-ranking auxiliary loss on lookahead
graphs."""

from __future__ import annotations

import math
import random
from collections import deque
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import torch

from . import driver
from .model import QModel, TGraph, Vocab, rank_loss, tensorize
from .records import atoms_of_candidate, goal_of, relabel_goal

DECISION_ENCODINGS = ("ad", "aa")  # one record carries all candidates


@dataclass
class TrainConfig:
    domain: str = ""
    train_instances: tuple[str, ...] = ()
    val_instances: tuple[str, ...] = ()
    workdir: str = "runs/default"
    episodes: int = 300
    trajectories_per_episode: int = 4
    steps_per_episode: int = 32
    batch_size: int = 32
    lr_start: float = 1e-3
    lr_end: float = 1e-5
    lr_horizon: int = 300
    tau_start: float = 1.0
    tau_end: float = 0.1
    tau_horizon: int = 1000
    gamma: float = 0.999
    reward: float = -1.0
    replay_capacity: int = 100  # decision points are whole lookahead trees
    replay_capacity_flat: int = 1000
    max_jumps: int = 20
    max_steps: int = 200
    rank_weight: float = 1.0
    mode: str = "iw_jump"
    encoding: str = "ad"
    variant: str = "aiw"
    k: Optional[int] = None
    dim: int = 32
    layers: int = 3
    hidden: int = 64
    validate_every: int = 5
    early_stop_patience: int = 3
    divergence_bound: float = 1e6
    seed: int = 0

    def replay_size(self) -> int:
        return self.replay_capacity if self.mode == "iw_jump" else self.replay_capacity_flat


def lr_at(cfg: TrainConfig, episode: int) -> float:
    frac = min(episode / max(cfg.lr_horizon, 1), 1.0)
    return cfg.lr_start + (cfg.lr_end - cfg.lr_start) * frac


def tau_at(cfg: TrainConfig, episode: int) -> float:
    frac = min(episode / max(cfg.tau_horizon, 1), 1.0)
    return cfg.tau_start + (cfg.tau_end - cfg.tau_start) * frac


def boltzmann_probs(q: torch.Tensor, tau: float) -> torch.Tensor:
    return torch.softmax(q / tau, dim=0)


def boltzmann_sample(q: torch.Tensor, tau: float, rng: random.Random) -> int:
    probs = boltzmann_probs(q, tau)
    r = rng.random()
    acc = 0.0
    for i, p in enumerate(probs.tolist()):
        acc += p
        if r < acc:
            return i
    return len(probs) - 1  # guard against rounding at the top end


@dataclass
class Transition:
    record: dict
    choice: int
    reward: float
    next_record: Optional[dict]  # None iff terminal
    terminal: bool
    relabeled: bool = False
    _t: Optional[TGraph] = field(default=None, repr=False)
    _t_next: Optional[TGraph] = field(default=None, repr=False)

    def tensors(self, vocab: Vocab):
        if self._t is None:
            self._t = tensorize(self.record, vocab)
            if self.next_record is not None:
                self._t_next = tensorize(self.next_record, vocab)
        return self._t, self._t_next


class Replay:
    def __init__(self, capacity: int):
        self.buf: deque[Transition] = deque(maxlen=capacity)

    def push(self, transitions: Sequence[Transition]) -> None:
        self.buf.extend(transitions)

    def sample(self, k: int, rng: random.Random) -> list[Transition]:
        if len(self.buf) >= k:
            return rng.sample(list(self.buf), k)
        return [rng.choice(list(self.buf)) for _ in range(k)]

    def __len__(self) -> int:
        return len(self.buf)


# ---------------------------------------------------------------------------
# trajectory collection


def make_scorefn(
    model: QModel,
    vocab: Vocab,
    *,
    tau: Optional[float] = None,
    rng: Optional[random.Random] = None,
    log: Optional[list] = None,
):
    """Scoring callback for ScorerServer.  With a temperature it samples and
    returns one-hot pseudo-scores; without one it returns the true Q values.
    Every scored record lands in ``log`` with the index that will win."""

    def scorefn(rec: dict) -> list[float]:
        q = score_record(model, vocab, rec)
        if tau is not None:
            idx = boltzmann_sample(q, tau, rng)
            values = [0.0] * len(q)
            values[idx] = 1.0
        else:
            idx = int(torch.argmax(q).item()) if len(q) else 0
            values = q.tolist()
        if log is not None:
            log.append((rec, idx))
        return values

    return scorefn


def score_record(model: QModel, vocab: Vocab, rec: dict) -> torch.Tensor:
    with torch.no_grad():
        return model.q_values(tensorize(rec, vocab))


def collect_trajectory(
    model: QModel,
    vocab: Vocab,
    cfg: TrainConfig,
    instance: str,
    rng: random.Random,
    tau: float,
) -> tuple[list[tuple[dict, int]], dict]:
    """One exploratory solve run; returns the decision log and the planner's
    result record."""
    if cfg.encoding not in DECISION_ENCODINGS:
        raise ValueError(
            f"collection needs one record per decision; encoding {cfg.encoding!r} "
            f"splits candidates across records"
        )
    decisions: list[tuple[dict, int]] = []
    scorefn = make_scorefn(model, vocab, tau=tau, rng=rng, log=decisions)
    with driver.ScorerServer(scorefn) as server:
        results = driver.solve(
            cfg.domain,
            [instance],
            scorer=server.address,
            mode=cfg.mode,
            encoding=cfg.encoding,
            variant=cfg.variant,
            k=cfg.k,
            max_choices=cfg.max_jumps,
            step_cap=cfg.max_steps,
        )
    return decisions, results[0]


def assemble_transitions(
    decisions: Sequence[tuple[dict, int]], result: dict, cfg: TrainConfig
) -> list[Transition]:
    """Pair consecutive decisions into one-step transitions.

    A solved run makes the last decision terminal.  A failed run's final
    decision has no successor record, so its tail is dropped (the relabeled
    variant resurrects it)."""
    out = []
    for i, (rec, choice) in enumerate(decisions):
        last = i == len(decisions) - 1
        if last and result["solved"]:
            out.append(Transition(rec, choice, cfg.reward, None, True))
        elif not last:
            out.append(
                Transition(rec, choice, cfg.reward, decisions[i + 1][0], False)
            )
    return out


def relabel_trajectory(
    decisions: Sequence[tuple[dict, int]], result: dict, cfg: TrainConfig
) -> list[Transition]:
    """Hindsight relabeling: pretend the goal was the goal-predicate fragment
    of the state the failed run actually reached.  Returns [] when no useful
    relabeled goal exists."""
    if result["solved"] or not decisions:
        return []
    if result.get("failure_reason") == "step_cap":
        # the last scored jump was rejected for exceeding the step budget,
        # so its arrival state was never reached
        decisions = decisions[:-1]
        if not decisions:
            return []
    last_rec, last_choice = decisions[-1]
    original = goal_of(last_rec)
    preds = {a[0] for a in original}
    final_state = atoms_of_candidate(
        last_rec, last_rec["candidates"][last_choice]
    )
    new_goal = frozenset(a for a in final_state if a[0] in preds)
    if not new_goal or new_goal == original:
        return []
    out = []
    for i, (rec, choice) in enumerate(decisions):
        arrival = atoms_of_candidate(rec, rec["candidates"][choice])
        terminal = new_goal <= arrival
        relabeled = relabel_goal(rec, new_goal)
        nxt = None if terminal else relabel_goal(decisions[i + 1][0], new_goal)
        out.append(
            Transition(relabeled, choice, cfg.reward, nxt, terminal, relabeled=True)
        )
        if terminal:
            break  # later decisions describe a post-goal world
    return out


# ---------------------------------------------------------------------------
# optimization


def td_loss(
    model: QModel,
    batch: Sequence[Transition],
    cfg: TrainConfig,
    vocab: Vocab,
    targets: Optional[torch.Tensor] = None,
) -> tuple[torch.Tensor, dict]:
    """Semi-gradient TD: targets come from the online network but are held
    constant under differentiation.  Pass ``targets`` to reuse a frozen
    target vector (the returned parts carry it)."""
    graphs, nexts, next_rows = [], [], []
    for i, tr in enumerate(batch):
        t, t_next = tr.tensors(vocab)
        graphs.append(t)
        if t_next is not None:
            nexts.append(t_next)
            next_rows.append(i)
    qs, f, offsets = model.forward_graphs(graphs)
    predicted = torch.stack([qs[i][tr.choice] for i, tr in enumerate(batch)])

    if targets is None:
        targets = torch.full(
            (len(batch),), cfg.reward, dtype=predicted.dtype, device=predicted.device
        )
        if nexts:
            with torch.no_grad():
                next_qs = model.q_graphs(nexts)
            best = torch.stack([q.max() for q in next_qs])
            targets[next_rows] = cfg.reward + cfg.gamma * best

    td = torch.mean((predicted - targets.detach()) ** 2)
    loss = td
    rank = None
    if cfg.rank_weight and cfg.encoding == "ad":
        zs = model.depth_scores(graphs, f, offsets)
        terms = [rank_loss(z) for z in zs if z.shape[0] >= 2]
        if terms:
            rank = torch.stack(terms).mean()
            loss = loss + cfg.rank_weight * rank
    return loss, {
        "td": float(td.detach()),
        "rank": float(rank.detach()) if rank is not None else 0.0,
        "targets": targets.detach(),
    }


def train_steps(
    model: QModel,
    optimizer: torch.optim.Optimizer,
    replay: Replay,
    cfg: TrainConfig,
    vocab: Vocab,
    rng: random.Random,
) -> dict:
    model.train()
    td_sum = rank_sum = 0.0
    for _ in range(cfg.steps_per_episode):
        batch = replay.sample(cfg.batch_size, rng)
        loss, parts = td_loss(model, batch, cfg, vocab)
        if not torch.isfinite(loss) or abs(parts["td"]) > cfg.divergence_bound:
            raise RuntimeError(f"training diverged: loss={float(loss)}")
        optimizer.zero_grad()
        loss.backward()
        optimizer.step()
        td_sum += parts["td"]
        rank_sum += parts["rank"]
    model.eval()
    n = cfg.steps_per_episode
    return {"td": td_sum / n, "rank": rank_sum / n}


# ---------------------------------------------------------------------------
# evaluation, checkpointing, main loop


def evaluate(
    model: QModel, vocab: Vocab, cfg: TrainConfig, instances: Sequence[str]
) -> dict:
    """Greedy rollout on each instance; coverage plus total plan length."""
    model.eval()
    scorefn = make_scorefn(model, vocab)
    with driver.ScorerServer(scorefn) as server:
        results = driver.solve(
            cfg.domain,
            list(instances),
            scorer=server.address,
            mode=cfg.mode,
            encoding=cfg.encoding,
            variant=cfg.variant,
            k=cfg.k,
            max_choices=cfg.max_jumps,
            step_cap=cfg.max_steps,
        )
    solved = [r for r in results if r["solved"]]
    return {
        "coverage": len(solved) / max(len(results), 1),
        "solved": len(solved),
        "total": len(results),
        "plan_length": sum(r["plan_length"] for r in solved),
        "results": results,
    }


def save_checkpoint(
    path: Path,
    model: QModel,
    vocab: Vocab,
    cfg: TrainConfig,
    episode: int,
    metrics: dict,
) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    torch.save(
        {
            "version": 1,
            "config": asdict(cfg),
            "vocab": vocab.to_json(),
            "state_dict": model.state_dict(),
            "episode": episode,
            "metrics": metrics,
        },
        path,
    )


def load_checkpoint(path) -> tuple[QModel, TrainConfig, dict]:
    blob = torch.load(path, map_location="cpu", weights_only=False)
    cfg_fields = {k: v for k, v in blob["config"].items() if k in TrainConfig.__dataclass_fields__}
    for key in ("train_instances", "val_instances"):
        if key in cfg_fields and isinstance(cfg_fields[key], list):
            cfg_fields[key] = tuple(cfg_fields[key])
    cfg = TrainConfig(**cfg_fields)
    vocab = Vocab.from_json(blob["vocab"])
    model = QModel(vocab, dim=cfg.dim, layers=cfg.layers, hidden=cfg.hidden)
    model.load_state_dict(blob["state_dict"])
    model.eval()
    return model, cfg, blob.get("metrics", {})


def build_vocab(cfg: TrainConfig) -> Vocab:
    records = driver.encode(
        cfg.domain,
        list(cfg.train_instances),
        encoding=cfg.encoding,
        variant=cfg.variant,
        k=cfg.k,
    )
    return Vocab.from_records(records)


def select_checkpoint(rows: list[dict], rng: random.Random) -> dict:
    """Best validation snapshot: coverage, then total plan length, then TD
    error, then a random pick among exact ties."""
    best = max(
        rows,
        key=lambda r: (
            r["metrics"]["coverage"],
            -r["metrics"]["plan_length"],
            -r["metrics"].get("td", math.inf),
        ),
    )
    ties = [
        r
        for r in rows
        if (
            r["metrics"]["coverage"],
            r["metrics"]["plan_length"],
            r["metrics"].get("td"),
        )
        == (
            best["metrics"]["coverage"],
            best["metrics"]["plan_length"],
            best["metrics"].get("td"),
        )
    ]
    return rng.choice(ties)


def train(cfg: TrainConfig, *, log=print) -> dict:
    """Full training run; returns {"checkpoint": path, "episodes": n, ...}."""
    rng = random.Random(cfg.seed)
    torch.manual_seed(cfg.seed)
    workdir = Path(cfg.workdir)
    vocab = build_vocab(cfg)
    model = QModel(vocab, dim=cfg.dim, layers=cfg.layers, hidden=cfg.hidden)
    model.eval()
    optimizer = torch.optim.Adam(model.parameters(), lr=cfg.lr_start)
    replay = Replay(cfg.replay_size())

    checkpoints: list[dict] = []
    perfect_streak = 0
    episodes_run = 0
    for episode in range(cfg.episodes):
        episodes_run = episode + 1
        for group in optimizer.param_groups:
            group["lr"] = lr_at(cfg, episode)
        tau = tau_at(cfg, episode)

        solved_count = 0
        for _ in range(cfg.trajectories_per_episode):
            instance = rng.choice(list(cfg.train_instances))
            decisions, result = collect_trajectory(
                model, vocab, cfg, instance, rng, tau
            )
            solved_count += bool(result["solved"])
            replay.push(assemble_transitions(decisions, result, cfg))
            if not result["solved"]:
                replay.push(relabel_trajectory(decisions, result, cfg))

        metrics = {"episode": episode, "tau": tau, "solved_trajectories": solved_count}
        if len(replay):
            metrics.update(train_steps(model, optimizer, replay, cfg, vocab, rng))

        is_grid = (episode + 1) % cfg.validate_every == 0
        if (is_grid or episode == cfg.episodes - 1) and cfg.val_instances:
            val = evaluate(model, vocab, cfg, cfg.val_instances)
            metrics.update(
                coverage=val["coverage"], plan_length=val["plan_length"]
            )
            path = workdir / f"checkpoint-{episode:04d}.pt"
            save_checkpoint(path, model, vocab, cfg, episode, metrics)
            checkpoints.append({"path": str(path), "metrics": metrics})
            log(
                f"episode {episode}: coverage {val['coverage']:.2f} "
                f"plan_length {val['plan_length']} td {metrics.get('td', 0):.4f}"
            )
            perfect_streak = perfect_streak + 1 if val["coverage"] == 1.0 else 0
            if perfect_streak >= cfg.early_stop_patience:
                log(f"early stop after {episode + 1} episodes")
                break
        elif log is not None and (episode + 1) % 10 == 0:
            log(f"episode {episode}: td {metrics.get('td', 0):.4f} replay {len(replay)}")

    if not checkpoints:  # no validation grid hit: save the final weights
        path = workdir / "checkpoint-final.pt"
        metrics = {"episode": episodes_run - 1, "coverage": 0.0, "plan_length": 0}
        save_checkpoint(path, model, vocab, cfg, episodes_run - 1, metrics)
        checkpoints.append({"path": str(path), "metrics": metrics})

    best = select_checkpoint(checkpoints, rng)
    return {
        "checkpoint": best["path"],
        "metrics": best["metrics"],
        "episodes": episodes_run,
        "checkpoints": checkpoints,
    }
