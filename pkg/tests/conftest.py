import pytest

_results: dict[str, str] = {}


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    name = dict(report.user_properties).get("criterion")
    if name is None:
        return
    if report.outcome == "failed" or _results.get(name) == "FAIL":
        _results[name] = "FAIL"
    elif report.outcome == "passed":
        _results[name] = "PASS"
    else:
        _results.setdefault(name, "SKIP")


@pytest.fixture(autouse=True)
def _tag_criterion(request):
    marker = request.node.get_closest_marker("criterion")
    if marker is not None:
        request.node.user_properties.append(("criterion", marker.args[0]))


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for name, status in _results.items():
        terminalreporter.write_line(f"{status:4}  {name}")
