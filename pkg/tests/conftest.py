import pytest

_LINES = []


@pytest.fixture
def criterion_line():
    """Record a one-line PASS/FAIL verdict shown in the terminal summary."""

    def record(number, ok, detail):
        line = f"CRITERION {number}: {'PASS' if ok else 'FAIL'} | {detail}"
        _LINES.append(line)
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if _LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
