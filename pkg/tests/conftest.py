from pathlib import Path

import pytest

from sessenc import load_program, parse_pi_type, parse_session_type

PROGRAMS = Path(__file__).resolve().parent.parent / "programs"


@pytest.fixture(scope="session")
def sys_process():
    return load_program(PROGRAMS / "sys.spi")[1]


@pytest.fixture(scope="session")
def sys_path():
    return PROGRAMS / "sys.spi"


# The four types of the select/branch example: T, U and their encodings.
@pytest.fixture(scope="session")
def T():
    return parse_session_type("rec X.+{l:X}")


@pytest.fixture(scope="session")
def U():
    return parse_session_type("rec X.&{l:X}")


@pytest.fixture(scope="session")
def tau():
    return parse_pi_type("rec X.lo[<l:~X>]")


@pytest.fixture(scope="session")
def upsilon():
    return parse_pi_type("rec X.li[<l:X>]")


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
