import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

_ACCEPTANCE: dict = {}


class AcceptanceLog:
    """Collects one PASS/FAIL line per acceptance criterion."""

    def record(self, number: int, ok: bool, title: str, detail: str, seconds: float):
        line = f"CRITERION {number} [{'PASS' if ok else 'FAIL'}] {title} ({seconds:.1f}s): {detail}"
        _ACCEPTANCE[number] = line
        print(line)


@pytest.fixture(scope="session")
def acceptance():
    return AcceptanceLog()


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_ACCEPTANCE):
        terminalreporter.write_line(_ACCEPTANCE[n])
