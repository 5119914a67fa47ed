import os
import subprocess
import sys
from pathlib import Path

import pytest

ACCEPTANCE: dict[int, tuple[str, str]] = {}


def record(n: int, ok: bool, what: str) -> None:
    ACCEPTANCE[n] = ("PASS" if ok else "FAIL", what)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        status, what = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n}: {status} {what}")


class Cli:
    def __init__(self, cache: Path):
        self.env = dict(os.environ, WANGTRANS_CACHE_DIR=str(cache))

    def __call__(self, *args: str, stdin: str | bytes | None = None, cwd=None) -> subprocess.CompletedProcess:
        data = stdin.encode() if isinstance(stdin, str) else stdin
        return subprocess.run(
            [sys.executable, "-m", "wangtrans", *args],
            input=data,
            capture_output=True,
            env=self.env,
            cwd=cwd,
            timeout=600,
        )


@pytest.fixture
def cli(tmp_path):
    return Cli(tmp_path / "cache")


@pytest.fixture(scope="session")
def session_cli(tmp_path_factory):
    return Cli(tmp_path_factory.mktemp("cache"))
