"""Shared test plumbing: verdict lines for the end-to-end gate.

The gate tests in test_acceptance.py record one PASS/FAIL line each;
printing happens in the terminal-summary hook so the lines survive
pytest's output capture.
"""

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
