import pytest

# one line per acceptance criterion, collected by tests/test_acceptance.py
ACCEPTANCE_LINES: list = []


@pytest.fixture
def report():
    def add(name: str, ok: bool, detail: str) -> None:
        line = f"{name} {'PASS' if ok else 'FAIL'} {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
    return add


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[0][1:])):
            terminalreporter.write_line(line)
