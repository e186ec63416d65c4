import re

_CRITERION = re.compile(r"test_criterion_(\d+)_")
_outcomes: dict[int, list[tuple[str, str]]] = {}


def pytest_runtest_logreport(report):
    m = _CRITERION.search(report.nodeid)
    if not m:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        name = report.nodeid.split("::")[-1]
        outcome = report.outcome
        if report.skipped and isinstance(report.longrepr, tuple):
            outcome = f"skipped ({report.longrepr[2].removeprefix('Skipped: ')})"
        _outcomes.setdefault(int(m.group(1)), []).append((name, outcome))


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_outcomes):
        parts = _outcomes[n]
        failed = any(o == "failed" for _, o in parts)
        ran = any(o == "passed" for _, o in parts)
        verdict = "FAIL" if failed else ("PASS" if ran else "SKIP")
        detail = "; ".join(f"{name}: {o}" for name, o in parts)
        terminalreporter.write_line(f"criterion {n:2d}: {verdict}  [{detail}]")
