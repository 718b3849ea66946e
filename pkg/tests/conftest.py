import pathlib
import sys

import pytest

sys.path.insert(0, str(pathlib.Path(__file__).parent))

CONFIGS = pathlib.Path(__file__).resolve().parents[1] / "configs"

_ACCEPTANCE: dict[int, tuple[str, bool, str]] = {}


class AcceptanceRecorder:
    """Collects one verdict per acceptance criterion for the terminal summary."""

    def record(self, number: int, title: str, checks: dict[str, bool], detail: str = ""):
        ok = all(checks.values())
        failed = [k for k, v in checks.items() if not v]
        note = detail if ok else f"failed: {', '.join(failed)}; {detail}"
        _ACCEPTANCE[number] = (title, ok, note)
        print(f"ACCEPTANCE {number} {'PASS' if ok else 'FAIL'}: {title} ({note})")
        return ok


@pytest.fixture
def acceptance():
    return AcceptanceRecorder()


@pytest.fixture
def table1_config():
    return CONFIGS / "table1.toml"


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_ACCEPTANCE):
        title, ok, note = _ACCEPTANCE[n]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {n}. {title}: {note}")
