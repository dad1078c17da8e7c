import os
import re

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow, HealthCheck.function_scoped_fixture])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

_CRITERIA = pytest.StashKey[dict]()


@pytest.fixture
def criterion(request):
    """Recorder for one acceptance criterion; the number comes from the test name."""
    number = int(re.search(r"criterion_(\d+)", request.node.name).group(1))
    table = request.config.stash.setdefault(_CRITERIA, {})

    def report(ok: bool, detail: str):
        table[number] = (bool(ok), detail)
        print(_line(number, ok, detail))

    yield report
    if number not in table:
        table[number] = (False, "raised before reporting")


def _line(number, ok, detail):
    return f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}"


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    table = config.stash.get(_CRITERIA, {})
    if table:
        terminalreporter.section("acceptance criteria")
        for number in sorted(table):
            terminalreporter.write_line(_line(number, *table[number]))
