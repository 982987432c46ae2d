import pytest

from surfdyn import gallery
from surfdyn.mapio import load_map

# filled in by test_acceptance; printed at the end of the run
ACCEPTANCE = {}


@pytest.fixture(scope="session")
def ex41():
    return load_map(gallery.EX41)


@pytest.fixture(scope="session")
def ex42():
    return load_map(gallery.EX42)


@pytest.fixture(scope="session")
def ex44():
    return load_map(gallery.EX44)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[key])
