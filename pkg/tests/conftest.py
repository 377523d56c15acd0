import os
import sys

import pytest
from hypothesis import settings

sys.path.insert(0, os.path.dirname(__file__))

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

# criterion id -> (passed, message); filled by the acceptance suite
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE, key=lambda k: int(k[2:])):
        ok, msg = ACCEPTANCE[key]
        terminalreporter.write_line(f"{key} {'PASS' if ok else 'FAIL'} {msg}")


@pytest.fixture
def record():
    def _record(key, ok, msg=""):
        ACCEPTANCE[key] = (bool(ok), msg)
        print(f"{key} {'PASS' if ok else 'FAIL'} {msg}")
    return _record
