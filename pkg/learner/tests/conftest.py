"""Shared helpers: drive the planner CLI as a subprocess (the learner talks
to it only through files, pipes, and sockets — never imports)."""

from __future__ import annotations

import json
import subprocess
import sys

import pytest

from widthjump_learner import blocks


def run_cli(*argv: str, check: bool = True) -> subprocess.CompletedProcess:
    proc = subprocess.run(
        [sys.executable, "-m", "widthjump", *argv],
        capture_output=True,
        text=True,
        timeout=120,
    )
    if check and proc.returncode != 0:
        raise AssertionError(
            f"widthjump {' '.join(argv)} -> {proc.returncode}\n{proc.stderr}"
        )
    return proc


def cli_available() -> bool:
    try:
        return run_cli("--help", check=False).returncode == 0
    except Exception:
        return False


def records_of(proc: subprocess.CompletedProcess) -> list[dict]:
    return [json.loads(line) for line in proc.stdout.splitlines() if line.strip()]


@pytest.fixture(scope="session")
def planner():
    if not cli_available():
        pytest.skip("planner CLI not installed")
    return run_cli


@pytest.fixture()
def bw(tmp_path, planner):
    """Blocksworld workspace: writes domain + named instances, encodes them."""

    class Workspace:
        domain = tmp_path / "domain.pddl"

        def __init__(self):
            self.domain.write_text(blocks.DOMAIN)

        def instance(self, name: str, text: str) -> str:
            path = tmp_path / f"{name}.pddl"
            path.write_text(text)
            return str(path)

        def encode(self, instance_path: str, encoding: str, *extra: str) -> list[dict]:
            proc = planner(
                "encode",
                "--domain", str(self.domain),
                "--instance", instance_path,
                "--encoding", encoding,
                *extra,
            )
            return records_of(proc)

    return Workspace()
