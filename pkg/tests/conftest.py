"""One PASS/FAIL line per acceptance criterion after the run."""

import pytest

_OUTCOMES = {}
_TITLES = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion n")


def pytest_collection_modifyitems(items):
    for item in items:
        m = item.get_closest_marker("criterion")
        if m is not None:
            n, title = m.args
            _TITLES[n] = title
            _OUTCOMES.setdefault(n, [])


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    m = item.get_closest_marker("criterion")
    if m is None:
        return
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        _OUTCOMES[m.args[0]].append(rep.passed)


def pytest_terminal_summary(terminalreporter):
    if not _TITLES:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for n in sorted(_TITLES):
        results = _OUTCOMES.get(n, [])
        if not results:
            status = "NOT RUN"
        else:
            status = "PASS" if all(results) else "FAIL"
        tr.write_line(f"criterion {n}: {status} - {_TITLES[n]} ({sum(results)}/{len(results)} checks)")
