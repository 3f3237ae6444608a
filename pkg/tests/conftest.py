import os

import pytest

from ringqec.codes import build_code
from ringqec.decoder import build_table
from ringqec.schedule import build_schedule

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def pytest_collection_modifyitems(config, items):
    if os.environ.get("RINGQEC_EXTENDED") == "1":
        return
    skip = pytest.mark.skip(reason="set RINGQEC_EXTENDED=1 to run")
    for item in items:
        if "extended" in item.keywords:
            item.add_marker(skip)


@pytest.fixture(scope="session")
def d3():
    code = build_code("linear", 3)
    return code, build_schedule(code), build_table(code)


@pytest.fixture(scope="session")
def d5():
    code = build_code("linear", 5)
    return code, build_schedule(code), build_table(code)


@pytest.fixture(scope="session")
def d7():
    code = build_code("linear", 7)
    return code, build_schedule(code), build_table(code)
