import numpy as np
import pytest

ACCEPTANCE_KEY = pytest.StashKey[list]()


@pytest.fixture
def rng():
    """Seeded generator so property-style tests are reproducible."""
    return np.random.default_rng(20260815)


@pytest.fixture
def criterion(request):
    """Record one scoreboard line per acceptance criterion, then assert.

    The lines are replayed in the terminal summary so they survive output
    capture and end up in any teed log.
    """
    lines = request.config.stash.setdefault(ACCEPTANCE_KEY, [])

    def _record(num: int, ok: bool, detail: str) -> None:
        status = "PASS" if ok else "FAIL"
        lines.append(f"criterion {num:02d} {status} — {detail}")
        assert ok, f"criterion {num:02d}: {detail}"

    return _record


def pytest_terminal_summary(terminalreporter):
    lines = terminalreporter.config.stash.get(ACCEPTANCE_KEY, None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
