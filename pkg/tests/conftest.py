from __future__ import annotations

import pytest

ACCEPTANCE_KEY = pytest.StashKey[dict]()


@pytest.fixture(scope="session")
def acceptance_report(request):
    """Per-criterion outcomes, printed in the terminal summary."""
    return request.config.stash.setdefault(ACCEPTANCE_KEY, {})


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    report = config.stash.get(ACCEPTANCE_KEY, {})
    if not report:
        return
    terminalreporter.section("acceptance criteria")
    for name, (passed, detail) in report.items():
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'} {name}: {detail}")
