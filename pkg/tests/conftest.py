"""Shared pytest plumbing.

Acceptance tests register one verdict line each; they are echoed after the
test summary so they are visible even without -s.
"""

acceptance_verdicts: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if acceptance_verdicts:
        terminalreporter.section("acceptance verdicts")
        for line in acceptance_verdicts:
            terminalreporter.write_line(line)
