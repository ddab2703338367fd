import pytest

_RESULTS = pytest.StashKey[dict]()


@pytest.fixture
def criterion(request):
    """Record one acceptance verdict; the summary hook prints them in order."""
    store = request.config.stash.setdefault(_RESULTS, {})

    def record(number, passed, detail):
        store[number] = (bool(passed), detail)
        return passed

    return record


def pytest_terminal_summary(terminalreporter, config):
    store = config.stash.get(_RESULTS, {})
    if not store:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(store):
        passed, detail = store[number]
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if passed else 'FAIL'}  {detail}")
