import pytest

_RESULTS = {}


class AcceptanceRecorder:
    def __init__(self, store):
        self._store = store

    def __call__(self, number, passed, detail):
        self._store[number] = (bool(passed), detail)
        return passed


@pytest.fixture
def acceptance():
    return AcceptanceRecorder(_RESULTS)


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_RESULTS):
        passed, detail = _RESULTS[number]
        terminalreporter.write_line(
            f"criterion {number:>2}: {'PASS' if passed else 'FAIL'}  {detail}"
        )
