import pathlib

import pytest

FIXTURES = pathlib.Path(__file__).parent / "fixtures"

_acceptance: dict[int, tuple[str, str]] = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py" not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1]
    if not name.startswith("test_criterion_"):
        return
    number = int(name.split("_")[2])
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _acceptance[number] = (report.outcome, name)


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_acceptance):
        outcome, name = _acceptance[number]
        verdict = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"criterion {number}: {verdict}  ({name})")


@pytest.fixture
def fixtures_dir():
    return FIXTURES
