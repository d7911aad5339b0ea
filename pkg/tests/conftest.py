import pytest
from hypothesis import HealthCheck, settings

# seed-controlled property runs: the same examples every time
settings.register_profile("repro", derandomize=True, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow, HealthCheck.filter_too_much])
settings.load_profile("repro")

_ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def acceptance_log():
    """Collects one summary line per acceptance criterion (shown at the end of the run)."""
    def log(line: str):
        print(line)
        _ACCEPTANCE_LINES.append(line)
    return log


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
