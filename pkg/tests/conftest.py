import pytest

_REPORT: list = []


@pytest.fixture
def report(capsys):
    """Record one PASS/FAIL line for an acceptance criterion and echo it live."""
    def emit(number, passed: bool, detail: str):
        line = f"criterion {number}: {'PASS' if passed else 'FAIL'} - {detail}"
        _REPORT.append(line)
        with capsys.disabled():
            print("\n" + line)
        return passed
    return emit


def pytest_terminal_summary(terminalreporter):
    if _REPORT:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_REPORT, key=lambda l: int(l.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
