from __future__ import annotations

import pytest


def pytest_runtest_logreport(report):
    """Print one PASS/FAIL line per acceptance criterion."""
    if "test_acceptance" not in report.nodeid or report.when != "call":
        return
    name = report.nodeid.split("::")[-1]
    if report.skipped:
        outcome = "SKIP"
    else:
        outcome = "PASS" if report.passed else "FAIL"
    print(f"\n[ACCEPTANCE] {outcome} {name}", flush=True)
