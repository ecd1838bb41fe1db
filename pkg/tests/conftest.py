"""Acceptance bookkeeping: tests marked ``criterion(n, name)`` roll up into one line per criterion."""
import pytest

_OUTCOMES: dict[int, dict] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, name): acceptance criterion covered by the test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or (rep.when != "call" and not rep.failed):
        return
    number, name = mark.args
    entry = _OUTCOMES.setdefault(number, {"name": name, "failed": [], "ran": 0})
    if rep.when == "call":
        entry["ran"] += 1
    if rep.failed:
        entry["failed"].append(item.name)


def pytest_terminal_summary(terminalreporter):
    if not _OUTCOMES:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_OUTCOMES):
        entry = _OUTCOMES[number]
        ok = not entry["failed"] and entry["ran"] > 0
        line = f"criterion {number}: {'PASS' if ok else 'FAIL'}: {entry['name']}"
        if entry["failed"]:
            line += f" (failing checks: {', '.join(entry['failed'])})"
        terminalreporter.write_line(line)
