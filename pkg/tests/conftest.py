import pytest

from bosejump.jump_solver import default_solver
from bosejump.oracle import solve_halfspace

_ACCEPTANCE = []


@pytest.fixture(scope="session")
def solver():
    return default_solver()


@pytest.fixture(scope="session")
def unit_coeffs(solver):
    return solver.solve_coefficients(1.0)


@pytest.fixture(scope="session")
def oracle_default():
    return solve_halfspace(1.0, L=30.0, n_mu=64, n_x=600)


@pytest.fixture(scope="session")
def oracle_refined():
    return solve_halfspace(1.0, L=30.0, n_mu=128, n_x=1200)


def pytest_runtest_logreport(report):
    if "test_acceptance.py" in report.nodeid and report.when == "call":
        _ACCEPTANCE.append((report.nodeid.split("::")[-1], report.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome in sorted(_ACCEPTANCE):
        status = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"{status}  {name}")
