"""Shared pytest wiring.

Re-emits the acceptance suite's one-line-per-criterion verdicts in the
terminal summary, so they are visible in plain ``pytest -v`` runs where
output capture would otherwise swallow the prints of passing tests.
"""

import sys


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    module = sys.modules.get("test_acceptance")
    lines = getattr(module, "REPORTED", None) if module else None
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
