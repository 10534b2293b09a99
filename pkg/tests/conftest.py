"""Shared fixtures and the acceptance summary printed at the end of a run."""
from __future__ import annotations

from collections import OrderedDict

import pytest

CRITERIA = OrderedDict(
    [
        (1, "Bessel accuracy"),
        (2, "Poiseuille strong adherence"),
        (3, "Discharge identity"),
        (4, "Weak adherence"),
        (5, "Classical limits"),
        (6, "Couette pressure"),
        (7, "Material algebra"),
        (8, "Ellipticity"),
    ]
)

_outcomes: dict[int, list[tuple[str, bool]]] = {k: [] for k in CRITERIA}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): test belongs to acceptance criterion n")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    if report.when == "call" or (report.when == "setup" and not report.passed):
        _outcomes[marker.args[0]].append((item.name, report.passed))


def pytest_terminal_summary(terminalreporter):
    if not any(_outcomes.values()):
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for k, title in CRITERIA.items():
        checks = _outcomes[k]
        if not checks:
            tr.write_line(f"criterion {k} {title}: NOT RUN")
            continue
        passed = sum(ok for _, ok in checks)
        verdict = "PASS" if passed == len(checks) else "FAIL"
        tr.write_line(f"criterion {k} {title}: {verdict} ({passed}/{len(checks)} checks)")
        for name, ok in checks:
            if not ok:
                tr.write_line(f"    failed: {name}")


@pytest.fixture
def rng():
    import numpy as np

    return np.random.default_rng(20240611)
