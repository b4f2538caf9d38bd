"""Collects outcomes of tests tagged ``@pytest.mark.acceptance("ACn")`` and
prints one PASS/FAIL line per criterion at the end of the session."""

import pytest

CRITERIA = {
    "AC1": "dimensioning, 1 s budget gives 7 stars",
    "AC2": "dimensioning, 2 s budget gives 19 or 20 stars; search agrees",
    "AC3": "5-star cycle is 748 ms within one backoff period",
    "AC4": "synchronization period golden values",
    "AC5": "energy ratio and ledger agreement",
    "AC6": "every high-priority frame delivered within the bound",
    "AC7": "deferred and prompt delay masses",
    "AC8": "comparison against the baseline modes",
    "AC9": "identical runs give byte-identical metrics",
    "AC10": "shortcut routing never worse than tree routing",
}

_owner = {}
_results = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(id): ties a test to an acceptance criterion")


def pytest_collection_modifyitems(items):
    for item in items:
        m = item.get_closest_marker("acceptance")
        if m:
            _owner[item.nodeid] = m.args[0]


def pytest_runtest_logreport(report):
    ac = _owner.get(report.nodeid)
    if ac is None:
        return
    if report.when == "call" or report.outcome != "passed":
        if hasattr(report, "wasxfail"):
            outcome = "xfail"
        else:
            outcome = report.outcome
        _results.setdefault(ac, []).append((report.nodeid.split("::")[-1], outcome))


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for ac, title in CRITERIA.items():
        got = _results.get(ac)
        if not got:
            continue
        bad = [name for name, o in got if o != "passed"]
        status = "PASS" if not bad else "FAIL"
        line = f"{ac} {status}: {title}"
        if bad:
            line += f" (not met: {', '.join(bad)})"
        tr.write_line(line)
