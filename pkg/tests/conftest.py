import pytest

_CRITERIA = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or rep.when not in ("setup", "call"):
        return
    n, title = mark.args
    if rep.when == "setup" and rep.passed:
        return
    status = "PASS" if rep.passed else "FAIL"
    if _CRITERIA.get(n, (None, "PASS"))[1] == "FAIL":
        status = "FAIL"
    detail = getattr(item, "criterion_detail", "")
    if n in _CRITERIA and _CRITERIA[n][2]:
        detail = "; ".join(filter(None, [_CRITERIA[n][2], detail]))
    _CRITERIA[n] = (title, status, detail)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        title, status, detail = _CRITERIA[n]
        line = f"{status} criterion {n}: {title}"
        terminalreporter.write_line(line + (f" ({detail})" if detail else ""))
