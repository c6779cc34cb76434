import re

_criteria = {}
_outcomes = {}


def pytest_collection_modifyitems(items):
    for item in items:
        m = re.search(r"test_criterion_(\d+)", item.name)
        if m and item.module.__name__.endswith("test_acceptance"):
            doc = (item.function.__doc__ or "").strip().splitlines()
            _criteria[item.nodeid] = (int(m.group(1)), doc[0] if doc else item.name)


def pytest_runtest_logreport(report):
    if report.nodeid in _criteria and (report.when == "call" or report.failed):
        if report.nodeid not in _outcomes or report.failed:
            _outcomes[report.nodeid] = "PASS" if report.passed else "FAIL"


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for nodeid, (num, title) in sorted(_criteria.items(), key=lambda kv: kv[1][0]):
        if nodeid in _outcomes:
            terminalreporter.write_line(f"criterion {num:2d}: {_outcomes[nodeid]}  {title}")
