import os
import sys

sys.path.insert(0, os.path.dirname(__file__))

# criterion number -> list of (label, passed, detail); filled by test_acceptance
ACCEPTANCE = {}


def record(criterion, label, passed, detail=""):
    ACCEPTANCE.setdefault(criterion, []).append((label, bool(passed), detail))
    return passed


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        parts = ACCEPTANCE[number]
        ok = all(p for _, p, _ in parts)
        detail = "; ".join(f"{label}: {'pass' if p else 'FAIL'}{' (' + d + ')' if d else ''}"
                           for label, p, d in parts)
        tr.write_line(f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
