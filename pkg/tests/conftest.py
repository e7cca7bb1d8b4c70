import math

import pytest

from procdamp import Kinematics, ToolGeometry

ACCEPTANCE_RESULTS = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE_RESULTS):
        ok, detail = ACCEPTANCE_RESULTS[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")


@pytest.fixture
def crush_tool():
    return ToolGeometry.from_degrees(10, 6, 100)


@pytest.fixture
def kin80():
    return Kinematics(2680, 6.7, 3, 6)


def rad(deg):
    return math.radians(deg)
