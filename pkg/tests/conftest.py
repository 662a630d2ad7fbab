import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("lab", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("lab")

_LINES: dict[int, str] = {}


@pytest.fixture
def criterion():
    """record(number, title, ok, detail): log one acceptance line, then assert."""

    def record(number: int, title: str, ok: bool, detail: str):
        line = f"{'PASS' if ok else 'FAIL'}  #{number:<2d} {title}: {detail}"
        _LINES[number] = line
        print(line)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter):
    if _LINES:
        terminalreporter.section("acceptance criteria")
        for n in sorted(_LINES):
            terminalreporter.write_line(_LINES[n])
