from pathlib import Path

import pytest

from filmfolio.ingestion import load_instance

DATA = Path(__file__).resolve().parents[1] / "src" / "filmfolio" / "data"


def fixture_path(k: int) -> Path:
    return DATA / f"test_problem_{k}.json"


@pytest.fixture(scope="session")
def tp1():
    return load_instance(fixture_path(1))


@pytest.fixture(scope="session")
def tp2():
    return load_instance(fixture_path(2))


@pytest.fixture(scope="session")
def tp3():
    return load_instance(fixture_path(3))


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
