import pytest

_RESULTS = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_RESULTS] = []


@pytest.fixture
def acceptance(pytestconfig):
    """Record one criterion outcome; the line is echoed in the terminal summary."""
    def record(label, passed, detail):
        pytestconfig.stash[_RESULTS].append((label, bool(passed), detail))
        return passed
    return record


def pytest_terminal_summary(terminalreporter, config):
    results = config.stash.get(_RESULTS, [])
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for label, passed, detail in results:
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {label}: {detail}")
