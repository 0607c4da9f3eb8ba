"""Shared pytest plumbing.

The acceptance tests register one line per criterion through
``record_criterion``; the collected lines are printed in a dedicated
section of the terminal summary so every run shows an explicit
pass/fail verdict for each criterion.
"""

_CRITERIA: list[tuple[str, bool, str]] = []


def record_criterion(name: str, passed: bool, detail: str) -> None:
    _CRITERIA.append((name, passed, detail))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for name, passed, detail in _CRITERIA:
        verdict = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"[{verdict}] {name}: {detail}")
