import pytest

_ACCEPTANCE = {}


@pytest.fixture
def acceptance():
    """Record one pass/fail line for an acceptance criterion."""

    def record(number, text, passed):
        _ACCEPTANCE[number] = (bool(passed), text)
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        passed, text = _ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number:>2}: {'PASS' if passed else 'FAIL'}  {text}")
