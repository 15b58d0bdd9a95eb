import pytest

_ACCEPTANCE = {}


@pytest.fixture
def acceptance():
    """Record ``(criterion, passed, detail)`` for the end-of-run summary."""

    def record(n, passed, detail):
        _ACCEPTANCE[n] = (bool(passed), detail)
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in range(1, 11):
        if n in _ACCEPTANCE:
            ok, detail = _ACCEPTANCE[n]
            terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
        else:
            terminalreporter.write_line(f"criterion {n:2d}: NOT RUN")
