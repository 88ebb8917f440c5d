import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

_ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def record():
    """Append one verdict line to the acceptance summary."""

    def _record(criterion: str, ok: bool | None, detail: str = "") -> None:
        verdict = {True: "PASS", False: "FAIL", None: "SKIP"}[ok]
        _ACCEPTANCE_LINES.append(f"[{verdict}] {criterion}" + (f" -- {detail}" if detail else ""))

    return _record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
