"""Benchmark the compiled seen-set kernel against the pure-Python fallback.

Covers the raw kernel operations on synthetic key streams and full lookahead
runs where the kernel sits on the hot path.  Run from the repository root:

    python3 benchmarks/bench_novelty.py [--repeat N]
"""

from __future__ import annotations

import argparse
import random
import time

import numpy as np

from widthjump import parse_domain, parse_instance, toys
from widthjump.ground import grounder_for
from widthjump.lookahead import LookaheadConfig, lookahead
from widthjump.novelty import _CompiledSeenSet
from widthjump._novelty_py import PySeenSet


def best_of(fn, repeat: int) -> float:
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def bench_add_all(kernel_cls, batches: list[np.ndarray]):
    def run():
        seen = kernel_cls()
        for batch in batches:
            seen.add_all(batch)
    return run


def bench_add_pairs(kernel_cls, layouts: list[tuple[np.ndarray, np.ndarray]]):
    def run():
        seen = kernel_cls()
        for flat, offsets in layouts:
            seen.add_pairs(flat, offsets)
    return run


def bench_lookahead(kernel_cls, inst, k: int, variant: str):
    root = grounder_for(inst).initial_state
    cfg = LookaheadConfig(variant=variant, k=k, kernel=kernel_cls)

    def run():
        lookahead(root, inst, cfg)
    return run


def synthetic_batches(n_batches: int, batch: int, overlap: float, rng) -> list[np.ndarray]:
    """Key batches with a controlled fraction of repeats, like the mix of
    stale and fresh forms a search layer produces."""
    out = []
    pool: list[int] = []
    for _ in range(n_batches):
        fresh = [rng.getrandbits(31) for _ in range(batch)]
        stale = rng.sample(pool, min(len(pool), int(batch * overlap))) if pool else []
        keys = fresh[: batch - len(stale)] + stale
        pool.extend(fresh[: batch - len(stale)])
        out.append(np.array(keys, dtype=np.uint64))
    return out


def synthetic_pair_layouts(n_states: int, atoms: int, forms: int, rng):
    layouts = []
    for _ in range(n_states):
        flat = np.array(
            [rng.getrandbits(31) for _ in range(atoms * forms)], dtype=np.uint64
        )
        offsets = np.arange(0, atoms * forms + 1, forms, dtype=np.int64)
        layouts.append((flat, offsets))
    return layouts


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--repeat", type=int, default=5, help="best-of repetitions")
    args = ap.parse_args()

    if _CompiledSeenSet is None:
        print("compiled kernel not built; benchmarking the pure kernel alone")
        kernels = [("python", PySeenSet)]
    else:
        kernels = [("compiled", _CompiledSeenSet), ("python", PySeenSet)]

    rng = random.Random(0)
    batches = synthetic_batches(n_batches=2000, batch=64, overlap=0.5, rng=rng)
    layouts = synthetic_pair_layouts(n_states=150, atoms=24, forms=3, rng=rng)

    bw = parse_domain(toys.BLOCKSWORLD_DOMAIN)
    spanner = parse_domain(toys.SPANNER_DOMAIN)
    bw6 = parse_instance(toys.random_blocksworld(6, random.Random(1), name="bw6"), bw)
    family = parse_instance(toys.spanner_family(150), spanner)

    scenarios = [
        ("add_all 2000x64 keys", lambda cls: bench_add_all(cls, batches)),
        ("add_pairs 150 states, 24 atoms x 3 forms", lambda cls: bench_add_pairs(cls, layouts)),
        ("lookahead iw k=1, 6-block restack", lambda cls: bench_lookahead(cls, bw6, 1, "iw")),
        ("lookahead iw k=2, 6-block restack", lambda cls: bench_lookahead(cls, bw6, 2, "iw")),
        ("lookahead aiw k=1, 150-object corridor", lambda cls: bench_lookahead(cls, family, 1, "aiw")),
    ]

    width = max(len(name) for name, _ in scenarios)
    header = f"{'scenario':<{width}}  " + "".join(f"{n:>12}" for n, _ in kernels)
    if len(kernels) == 2:
        header += f"{'speedup':>10}"
    print(header)
    print("-" * len(header))
    for name, make in scenarios:
        row = f"{name:<{width}}  "
        times = []
        for _, cls in kernels:
            t = best_of(make(cls), args.repeat)
            times.append(t)
            row += f"{t * 1000:>10.2f}ms"
        if len(times) == 2 and times[0] > 0:
            row += f"{times[1] / times[0]:>9.1f}x"
        print(row)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
