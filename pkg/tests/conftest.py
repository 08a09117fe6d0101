import pytest

_REPORT: list[str] = []


@pytest.fixture
def report():
    """Record one acceptance verdict line; echoed in the terminal summary."""

    def emit(criterion: int, ok: bool, text: str) -> bool:
        line = f"[{criterion:>2}] {'PASS' if ok else 'FAIL'}  {text}"
        _REPORT.append(line)
        print(line)
        return ok

    return emit


def pytest_terminal_summary(terminalreporter):
    if _REPORT:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_REPORT, key=lambda s: int(s[1:3])):
            terminalreporter.write_line(line)
