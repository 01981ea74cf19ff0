"""测试共用夹具：剖面求解较慢，按会话缓存"""
import numpy as np
import pytest

from app.analysis.profile_solver import rankine_hugoniot, shock_from_closure, solve_profile
from app.dao import ModelCatalogDAO
from app.models import Burgers


@pytest.fixture(scope="session")
def burgers():
    return Burgers()


@pytest.fixture(scope="session")
def burgers_triple(burgers):
    return rankine_hugoniot(burgers, [1.0], U_plus=[-1.0])


@pytest.fixture(scope="session")
def burgers_profile(burgers, burgers_triple):
    return solve_profile(burgers, burgers_triple)


@pytest.fixture(scope="session")
def front_system():
    return ModelCatalogDAO.create("unstable_front")


@pytest.fixture(scope="session")
def front_profile(front_system):
    triple = rankine_hugoniot(front_system, [1.0], U_plus=[-1.0])
    return solve_profile(front_system, triple)


@pytest.fixture(scope="session")
def ns_system():
    return ModelCatalogDAO.create("navier_stokes")


@pytest.fixture(scope="session")
def ns_mach105_profile(ns_system):
    U_minus = ns_system.from_natural(np.array([1.0, 0.0, 1.0]))
    triple = shock_from_closure(ns_system, U_minus, mach=1.05)
    return solve_profile(ns_system, triple)


@pytest.fixture(scope="session")
def burgers_2d():
    return Burgers(d=2)


@pytest.fixture(scope="session")
def burgers_2d_triple(burgers_2d):
    return rankine_hugoniot(burgers_2d, [1.0], U_plus=[-1.0])


@pytest.fixture(scope="session")
def burgers_2d_profile(burgers_2d, burgers_2d_triple):
    return solve_profile(burgers_2d, burgers_2d_triple)
