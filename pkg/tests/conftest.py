"""One pass/fail line per acceptance criterion at the end of the run.

Acceptance tests carry ``@pytest.mark.criterion(n, "title")``; a criterion
passes when every test attached to it passed.  Tests may append free-form
lines to ``REPORT`` (e.g. a comparison table) which are printed too.
"""
from collections import defaultdict

import pytest

REPORT = []
_titles = {}
_outcomes = defaultdict(list)


def pytest_collection_modifyitems(items):
    for item in items:
        mark = item.get_closest_marker("criterion")
        if mark:
            _titles[mark.args[0]] = mark.args[1]
            item.user_properties.append(("criterion", mark.args[0]))


def pytest_runtest_logreport(report):
    crit = dict(report.user_properties).get("criterion")
    if crit is None:
        return
    if report.when == "call" or report.outcome != "passed":
        _outcomes[crit].append((report.nodeid.split("::")[-1], report.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _titles:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for line in REPORT:
        tr.write_line(line)
    for n in sorted(_titles):
        results = _outcomes.get(n, [])
        ok = bool(results) and all(o == "passed" for _, o in results)
        failed = [name for name, o in results if o != "passed"]
        detail = "" if ok else f"  (failing: {', '.join(failed) or 'not run'})"
        tr.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {_titles[n]}{detail}")
