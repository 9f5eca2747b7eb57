import pytest

from biphoton import get_preset, validate_config


@pytest.fixture(scope="session")
def kim_shih():
    return validate_config(get_preset("kim-shih"))


@pytest.fixture(scope="session")
def strekalov():
    return validate_config(get_preset("strekalov"))


# one line per acceptance criterion, filled in by test_acceptance.py
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
