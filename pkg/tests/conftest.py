"""Per-criterion PASS/FAIL lines for the acceptance suite.

Acceptance tests carry ``@pytest.mark.criterion(n, title)`` and may fill the
``measured`` fixture with the numbers they checked; both end up in the
terminal summary.
"""

import pytest

_RESULTS: dict = {}
_MEASURED: dict = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion covered by this test")


@pytest.fixture
def measured(request):
    d = {}
    _MEASURED[request.node.nodeid] = d
    return d


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    number, title = mark.args
    if rep.when == "call" or (rep.when == "setup" and rep.outcome != "passed"):
        status = {"passed": "PASS", "failed": "FAIL", "skipped": "SKIP"}[rep.outcome]
        entry = _RESULTS.setdefault(number, {"title": title, "status": [], "nodes": []})
        entry["status"].append(status)
        entry["nodes"].append(item.nodeid)


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for number in sorted(_RESULTS):
        entry = _RESULTS[number]
        st = entry["status"]
        overall = "FAIL" if "FAIL" in st else ("SKIP" if all(s == "SKIP" for s in st) else "PASS")
        details = []
        for node in entry["nodes"]:
            for k, v in _MEASURED.get(node, {}).items():
                details.append(f"{k}={v:.6g}" if isinstance(v, float) else f"{k}={v}")
        extra = f"  [{', '.join(details)}]" if details else ""
        tr.write_line(f"criterion {number:>2}: {overall}  {entry['title']}{extra}")
