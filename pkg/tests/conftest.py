import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

# criterion number -> (severity, text, note); a criterion spread over several
# tests reports its worst outcome
_criteria: dict[int, tuple[int, str, str]] = {}
_LABELS = ("PASS", "FAIL", "FAIL")


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(num, text): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or report.when != "call" and not report.failed:
        return
    num, text = mark.args
    if hasattr(report, "wasxfail"):
        severity, note = 1, f"known failure: {report.wasxfail}"
    else:
        severity, note = (0, "") if report.passed else (2, "")
    prev = _criteria.get(num)
    if prev is None or severity > prev[0]:
        _criteria[num] = (severity, text, note)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_criteria):
        severity, text, note = _criteria[num]
        line = f"[{_LABELS[severity]}] criterion {num}: {text}"
        terminalreporter.write_line(f"{line} ({note})" if note else line)
