import pytest

from oracles import load_sample

ACCEPTANCE_REPORT: list[str] = []


@pytest.fixture(scope="session")
def paths():
    return load_sample("paths")


@pytest.fixture(scope="session")
def stars():
    return load_sample("stars")


@pytest.fixture(scope="session")
def twocolor():
    return load_sample("twocolor")


@pytest.fixture(scope="session")
def report():
    return ACCEPTANCE_REPORT


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_REPORT:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_REPORT:
            terminalreporter.write_line(line)
