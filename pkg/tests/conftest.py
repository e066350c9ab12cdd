import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

# criterion label -> [status, seconds]; filled from tests marked with @pytest.mark.criterion
ACCEPTANCE = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(label): acceptance criterion this test decides")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    m = item.get_closest_marker("criterion")
    if m is None or rep.when == "teardown":
        return
    if rep.when == "setup" and rep.passed:
        return
    label = str(m.args[0])
    entry = ACCEPTANCE.setdefault(label, ["PASS", 0.0])
    entry[1] += rep.duration
    if not rep.passed:
        entry[0] = "FAIL"


def _order(label):
    digits = "".join(ch for ch in label if ch.isdigit())
    return int(digits or 0), label


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for label in sorted(ACCEPTANCE, key=_order):
        status, secs = ACCEPTANCE[label]
        terminalreporter.write_line(f"criterion {label}: {status} ({secs:.1f} s)")
