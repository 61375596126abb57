import pytest

from tapsim.documents import load_fixture


@pytest.fixture
def canonical():
    return load_fixture("canonical-install")


@pytest.fixture
def canonical_stack(canonical):
    return canonical.stack(0)


ACCEPTANCE: dict[int, tuple[str, bool, str]] = {}


@pytest.fixture
def criterion():
    """Record one acceptance line: ``criterion(n, title, passed, detail)``."""

    def record(n, title, passed, detail=""):
        ACCEPTANCE[n] = (title, bool(passed), detail)
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        title, ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {n:>2}. {title}" + (f"  ({detail})" if detail else ""))
