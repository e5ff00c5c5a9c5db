"""Suite-wide fixtures: the acceptance-criteria log that prints one
"ACCEPTANCE n: PASS/FAIL" line per criterion in the terminal summary."""

from __future__ import annotations

import pytest


class AcceptanceLog:
    """Collects (criterion number -> verdict, detail) across the session."""

    def __init__(self):
        self.results: dict[int, tuple[bool, str]] = {}

    def record(self, n: int, passed: bool, detail: str = "") -> None:
        self.results[n] = (bool(passed), detail)

    def check(self, n: int, passed: bool, detail: str = "") -> None:
        """Record the verdict, then fail the test if it did not pass."""
        self.record(n, passed, detail)
        assert passed, f"ACCEPTANCE {n} failed: {detail}"


def pytest_configure(config):
    config._acceptance_log = AcceptanceLog()


@pytest.fixture(scope="session")
def acceptance(request) -> AcceptanceLog:
    return request.config._acceptance_log


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    log = getattr(config, "_acceptance_log", None)
    if log is None or not log.results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(log.results):
        passed, detail = log.results[n]
        verdict = "PASS" if passed else "FAIL"
        suffix = f" — {detail}" if detail else ""
        terminalreporter.write_line(f"ACCEPTANCE {n}: {verdict}{suffix}")
