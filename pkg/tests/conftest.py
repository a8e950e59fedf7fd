import pytest

from zenocascade.cli import builtin_source
from zenocascade.lang import parse_source

CORPUS = ["puzzle", "thompson", "setone", "relay", "twice", "steady", "spin"]


def load(name):
    return parse_source(builtin_source(name))


@pytest.fixture(scope="session")
def puzzle():
    return load("puzzle")


@pytest.fixture(scope="session")
def thompson():
    return load("thompson")


@pytest.fixture(scope="session")
def programs():
    return {name: load(name) for name in CORPUS}


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
