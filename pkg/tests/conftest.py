import math

import pytest
from hypothesis import HealthCheck, settings

from cayleynorms import enumerate_ball, free_abelian, free_group, free_product

settings.register_profile("default", deadline=None, max_examples=100,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

LN3 = math.log(3)
SQRT3_2 = math.sqrt(3) / 2


@pytest.fixture(scope="session")
def F2():
    return free_group(2)


@pytest.fixture(scope="session")
def F3():
    return free_group(3)


@pytest.fixture(scope="session")
def Z2():
    return free_abelian(2)


@pytest.fixture(scope="session")
def C222():
    return free_product(2, 2, 2)


@pytest.fixture(scope="session")
def C23():
    return free_product(2, 3)


@pytest.fixture(scope="session")
def F2_ball8(F2):
    return enumerate_ball(F2, 8)


@pytest.fixture(scope="session")
def F2_ball10(F2):
    return enumerate_ball(F2, 10)


@pytest.fixture(scope="session")
def Z2_ball12(Z2):
    return enumerate_ball(Z2, 12)


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for k in sorted(results):
            terminalreporter.write_line(results[k])
