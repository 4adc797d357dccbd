import pytest

# criterion number -> list of summary lines, filled by the acceptance tests
ACCEPTANCE_LINES: dict[int, list[str]] = {}


@pytest.fixture
def record():
    def _record(criterion: int, ok: bool, text: str) -> None:
        ACCEPTANCE_LINES.setdefault(criterion, []).append(f"[{'PASS' if ok else 'FAIL'}] criterion {criterion}: {text}")

    return _record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for crit in sorted(ACCEPTANCE_LINES):
        for line in ACCEPTANCE_LINES[crit]:
            terminalreporter.write_line(line)
