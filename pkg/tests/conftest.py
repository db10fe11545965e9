from pathlib import Path

import pytest

from d2d_idnc.fixtures import example_1, example_2

DATA = Path(__file__).parent / "data"


@pytest.fixture
def ex1():
    return example_1()


@pytest.fixture
def ex2():
    return example_2()


@pytest.fixture
def data_dir():
    return DATA


def pytest_terminal_summary(terminalreporter):
    import sys

    module = sys.modules.get("test_acceptance")
    lines = getattr(module, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
