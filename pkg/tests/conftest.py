import pytest

_ACCEPTANCE: list[tuple[str, str]] = []


def pytest_runtest_logreport(report):
    if report.when != "call" or "test_acceptance.py" not in report.nodeid:
        return
    title = getattr(report, "criterion", None)
    if title:
        _ACCEPTANCE.append(("PASS" if report.passed else "FAIL", title))


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    doc = (item.function.__doc__ or "").strip().splitlines()
    if doc and doc[0].startswith("Criterion"):
        report.criterion = doc[0]


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for verdict, title in sorted(_ACCEPTANCE, key=lambda x: int(x[1].split()[1].rstrip(":"))):
        terminalreporter.write_line(f"{verdict}  {title}")
