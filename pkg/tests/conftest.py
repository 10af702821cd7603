"""Shared test plumbing: acceptance-criterion result recording.

Acceptance tests call ``record_criterion`` so a single PASS/FAIL line per
criterion is printed in the terminal summary regardless of output capture.
"""
from typing import Dict, Tuple

_RESULTS: Dict[int, Tuple[bool, str]] = {}


def record_criterion(number: int, ok: bool, detail: str) -> None:
    _RESULTS[number] = (ok, detail)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_RESULTS):
        ok, detail = _RESULTS[number]
        status = "PASS" if ok else "FAIL"
        terminalreporter.write_line(f"CRITERION {number:2d}: {status} — {detail}")
