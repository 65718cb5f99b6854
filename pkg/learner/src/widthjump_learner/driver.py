"""Run the planner CLI as a subprocess and serve Q values to it over TCP.

The learner never imports the planner: trajectories are collected by
launching ``python -m widthjump solve --scorer tcp:...`` against a local
scoring server, and everything the trainer needs (the graph record of every
decision point and the index that was chosen) is harvested on the server
side of that socket.
"""

from __future__ import annotations

import json
import socket
import subprocess
import sys
import threading
from typing import Callable, Optional, Sequence

from .records import error_record, q_record, read_message, write_message

ScoreFn = Callable[[dict], Sequence[float]]


class ScorerServer:
    """Framed request/response scoring endpoint on 127.0.0.1.

    ``scorefn(record) -> values`` is called for every graph record; an
    exception turns into an error record and the connection stays open.
    Connections are served one at a time — when a peer disconnects the
    server accepts the next — matching the planner's one-connection-per-
    instance behaviour."""

    def __init__(self, scorefn: ScoreFn):
        self.scorefn = scorefn
        self._sock = socket.create_server(("127.0.0.1", 0))
        self._sock.settimeout(0.1)
        self.port = self._sock.getsockname()[1]
        self._closed = threading.Event()
        self._thread = threading.Thread(target=self._serve, daemon=True)
        self._thread.start()

    @property
    def address(self) -> str:
        return f"tcp:127.0.0.1:{self.port}"

    def _serve(self) -> None:
        while not self._closed.is_set():
            try:
                conn, _ = self._sock.accept()
            except TimeoutError:
                continue
            except OSError:
                return
            with conn:
                rf = conn.makefile("rb")
                wf = conn.makefile("wb")
                try:
                    while (rec := read_message(rf)) is not None:
                        try:
                            out = q_record(self.scorefn(rec))
                        except Exception as exc:  # keep the session alive
                            out = error_record(f"{type(exc).__name__}: {exc}")
                        write_message(wf, out)
                except (OSError, ValueError):
                    pass  # peer vanished mid-frame; accept the next one

    def close(self) -> None:
        self._closed.set()
        try:
            self._sock.close()
        finally:
            self._thread.join(timeout=2.0)

    def __enter__(self) -> "ScorerServer":
        return self

    def __exit__(self, *exc) -> None:
        self.close()


class PlannerError(RuntimeError):
    pass


def solve(
    domain: str,
    instances: Sequence[str],
    *,
    scorer: Optional[str] = None,
    mode: str = "iw_jump",
    encoding: str = "ad",
    variant: str = "aiw",
    k: Optional[int] = None,
    max_choices: Optional[int] = None,
    step_cap: Optional[int] = None,
    seed: Optional[int] = None,
    timeout: float = 300.0,
) -> list[dict]:
    """One ``widthjump solve`` run; returns the per-instance result records."""
    argv = [
        sys.executable, "-m", "widthjump", "solve",
        "--domain", domain, "--instance", *instances,
        "--mode", mode, "--variant", variant,
    ]
    if mode != "flat_aa":
        argv += ["--encoding", encoding]
    if scorer is not None:
        argv += ["--scorer", scorer]
    if k is not None:
        argv += ["--k", str(k)]
    if max_choices is not None:
        argv += ["--max-choices", str(max_choices)]
    if step_cap is not None:
        argv += ["--step-cap", str(step_cap)]
    if seed is not None:
        argv += ["--seed", str(seed)]
    proc = subprocess.run(
        argv, capture_output=True, text=True, timeout=timeout
    )
    if proc.returncode not in (0, 1):
        raise PlannerError(
            f"planner exited {proc.returncode}: {proc.stderr.strip()[:500]}"
        )
    records = [json.loads(line) for line in proc.stdout.splitlines() if line.strip()]
    if not records:
        raise PlannerError(f"planner produced no output: {proc.stderr.strip()[:500]}")
    return records


def encode(
    domain: str,
    instances: Sequence[str],
    *,
    encoding: str = "ad",
    variant: str = "aiw",
    k: Optional[int] = None,
    timeout: float = 120.0,
) -> list[dict]:
    """One ``widthjump encode`` run; returns the graph records."""
    argv = [
        sys.executable, "-m", "widthjump", "encode",
        "--domain", domain, "--instance", *instances,
        "--encoding", encoding, "--variant", variant,
    ]
    if k is not None:
        argv += ["--k", str(k)]
    proc = subprocess.run(argv, capture_output=True, text=True, timeout=timeout)
    if proc.returncode != 0:
        raise PlannerError(
            f"planner exited {proc.returncode}: {proc.stderr.strip()[:500]}"
        )
    return [json.loads(line) for line in proc.stdout.splitlines() if line.strip()]
