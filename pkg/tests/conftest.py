import pytest

ACCEPTANCE: dict = {}


@pytest.fixture
def record():
    """Register an acceptance verdict; printed in the terminal summary."""

    def _record(number, name, ok, detail=""):
        ACCEPTANCE[(number, name)] = (bool(ok), detail)
        return ok

    return _record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for (number, name), (ok, detail) in sorted(ACCEPTANCE.items()):
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {number}. {name}  {detail}")
