import pytest

_ACCEPTANCE = []


@pytest.fixture
def record():
    """Record ``(criterion, item, ok, detail)`` for the acceptance summary."""

    def add(criterion, item, ok, detail=""):
        _ACCEPTANCE.append((criterion, item, bool(ok), detail))
        return ok

    return add


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for c in sorted({r[0] for r in _ACCEPTANCE}):
        items = [r for r in _ACCEPTANCE if r[0] == c]
        bad = [r[1] for r in items if not r[2]]
        status = "PASS" if not bad else "FAIL"
        tail = f" (failing: {', '.join(bad)})" if bad else ""
        tr.write_line(f"criterion {c}: {status}  {len(items) - len(bad)}/{len(items)} items{tail}")
    tr.section("acceptance details")
    for c, item, ok, detail in _ACCEPTANCE:
        tr.write_line(f"  [{c}] {'PASS' if ok else 'FAIL'} {item}: {detail}")
