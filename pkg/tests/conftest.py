import pytest

from esslab.core import SupportDirection

NULL = SupportDirection.SUPPORTS_NULL
ALT = SupportDirection.SUPPORTS_ALTERNATIVE

# acceptance verdicts collected by tests/test_acceptance.py
ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def threads(monkeypatch):
    """Set ESSLAB_THREADS for the duration of a test."""

    def _set(value):
        monkeypatch.setenv("ESSLAB_THREADS", str(value))

    return _set


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
