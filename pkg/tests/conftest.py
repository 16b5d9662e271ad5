import pytest
from hypothesis import settings

# Fixed example generation keeps the suite reproducible from run to run.
settings.register_profile("repo", derandomize=True, deadline=None)
settings.load_profile("repo")

_VERDICTS: list[str] = []


@pytest.fixture
def verdict():
    """Record and print one PASS/FAIL line for an acceptance criterion."""

    def record(number: int, title: str, passed: bool, detail: str) -> bool:
        line = f"criterion {number} {title}: {'PASS' if passed else 'FAIL'} ({detail})"
        print(line)
        _VERDICTS.append(line)
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if _VERDICTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_VERDICTS, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
