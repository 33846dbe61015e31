import pytest

from jointmeas import reference_scenario

# One line per acceptance criterion, echoed after the run so the terminal
# report always carries them (capture would otherwise swallow the prints).
ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def reference():
    """(state, slide, w) at the hardware operating point."""
    return reference_scenario()


@pytest.fixture
def criterion():
    def _report(number: int, ok: bool, detail: str) -> None:
        line = f"[criterion {number}] {'PASS' if ok else 'FAIL'} - {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        assert ok, line

    return _report


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.write_sep("-", "acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
