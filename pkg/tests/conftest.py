from collections import defaultdict

import pytest

_outcomes = defaultdict(list)

CRITERIA = {
    1: "kernel routes agree",
    2: "worked n=2, N=5 kernel",
    3: "identity suite",
    4: "centre-weight asymptotics",
    5: "closed-form vs exact-cost argmin",
    6: "MMSE prefactor range",
    7: "reference table regression",
    8: "iterative selector on X1",
    9: "formula vs Monte Carlo oracle",
    10: "bias-variance ordering",
    11: "bench determinism",
}


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    for k in getattr(report, "criteria", ()):
        _outcomes[k].append(report.outcome)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    report.criteria = [m.args[0] for m in item.iter_markers("criterion")]


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for k in sorted(_outcomes):
        res = _outcomes[k]
        ok = all(r == "passed" for r in res)
        passed = sum(r == "passed" for r in res)
        tr.write_line(f"criterion {k:2d} {'PASS' if ok else 'FAIL'}  "
                      f"{CRITERIA.get(k, '')} ({passed}/{len(res)} checks)")
