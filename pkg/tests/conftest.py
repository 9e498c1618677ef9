"""Suite-wide configuration: the acceptance criterion reporter.

Acceptance tests call record_criterion() once per criterion; the hook
below prints one pass/fail line per criterion after the summary, so the
verdicts survive output capturing and show up in piped logs.
"""

from __future__ import annotations

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

_CRITERIA: dict[int, tuple[bool, str]] = {}


def record_criterion(number: int, ok: bool, detail: str = "") -> None:
    _CRITERIA[number] = (ok, detail)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _CRITERIA:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        ok, detail = _CRITERIA[number]
        verdict = "PASS" if ok else "FAIL"
        suffix = f" ({detail})" if detail else ""
        tr.write_line(f"criterion {number}: {verdict}{suffix}")
