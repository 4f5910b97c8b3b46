import pytest

_ACCEPTANCE: list[tuple[str, bool, str]] = []


@pytest.fixture
def record():
    """Log one acceptance verdict; the summary is printed at the end of the run."""
    def _record(criterion: str, passed: bool, detail: str) -> bool:
        _ACCEPTANCE.append((criterion, passed, detail))
        print(f"{'PASS' if passed else 'FAIL'} {criterion}: {detail}")
        return passed
    return _record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for criterion, passed, detail in _ACCEPTANCE:
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'} {criterion}: {detail}")
