import re

_RESULTS = {}


def pytest_runtest_logreport(report):
    m = re.search(r"test_criterion_(\d+)", report.nodeid)
    if not m:
        return
    n = int(m.group(1))
    if report.when == "call" or report.outcome != "passed":
        if report.outcome == "failed" or n not in _RESULTS:
            _RESULTS[n] = (report.outcome, report.duration)


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_RESULTS):
        outcome, dur = _RESULTS[n]
        status = "PASS" if outcome == "passed" else outcome.upper() if outcome == "skipped" else "FAIL"
        terminalreporter.write_line(f"criterion {n:2d}: {status} ({dur:.2f} s)")
