"""Shared fixtures plus the acceptance-criteria report.

Acceptance tests register a named verdict through the `acceptance` fixture;
the terminal summary then prints one PASS/FAIL line per criterion so the
run's acceptance status is readable at a glance.
"""

from __future__ import annotations

import pytest

from sinrsched import generate_instance

_RESULTS: dict[str, tuple[bool, float | None, str]] = {}


@pytest.fixture
def acceptance():
    """Recorder callable: acceptance(name, ok, seconds=None, note="")."""

    def _record(name: str, ok: bool, seconds: float | None = None, note: str = "") -> None:
        _RESULTS[name] = (bool(ok), seconds, note)

    return _record


@pytest.fixture(scope="session")
def preset_instance():
    # the replication topology: 200 links, lengths 1..20, 100x100 field
    return generate_instance(200, 1.0, 20.0, 100.0, 7, alpha=2.5, beta=1.0, noise=0.0)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _RESULTS:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for name, (ok, seconds, note) in _RESULTS.items():
        line = f"ACCEPTANCE: {name}: {'PASS' if ok else 'FAIL'}"
        if seconds is not None:
            line += f" [{seconds:.1f}s]"
        if note:
            line += f" ({note})"
        terminalreporter.write_line(line)
