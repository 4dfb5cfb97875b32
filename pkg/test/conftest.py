import numpy as np
import pytest

from minkowski_orbits.analysis.nonlinearity import Nonlinearity
from minkowski_orbits.analysis.weight import WeightPiece, WeightProfile
from minkowski_orbits.config.logging import set_verbosity

DEFAULT_SEED = 20240917


def pytest_addoption(parser):
    parser.addoption(
        "--seed", action="store", type=int, default=DEFAULT_SEED,
        help="seed of the randomized cases"
    )
    parser.addoption(
        "--run-slow", action="store_true", default=False,
        help="run the delta sweeps and classification grids"
    )


def pytest_collection_modifyitems(config, items):
    if config.getoption("--run-slow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --run-slow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture(autouse=True)
def quiet_logging():
    set_verbosity(True)
    yield
    set_verbosity(False)


@pytest.fixture
def seed(request):
    return request.config.getoption("--seed")


@pytest.fixture
def rng(seed):
    return np.random.default_rng(seed)


@pytest.fixture(scope='session')
def cubic04():
    return Nonlinearity.cubic_bistable(0.4)


@pytest.fixture(scope='session')
def cubic05():
    """
    Balanced case: F(1) = 0.
    """
    return Nonlinearity.cubic_bistable(0.5)


@pytest.fixture
def unit_weight():
    return WeightProfile.constant(1.0)


@pytest.fixture
def benchmark_weight():
    """
    q = 1 + 0.5|sin t| left of 0 (eta = 1) and 0.3 on the right.
    """
    return WeightProfile([
        WeightPiece(None, 0.0, expression='1 + 0.5*abs(sin(t))', period=np.pi, origin=0.0),
        WeightPiece(0.0, None, constant=0.3),
    ])


@pytest.fixture
def scenario_record():
    return {
        'schema_version': 1,
        'command': 'classify-stepwise',
        'name': 'Stepwise Heteroclinic',
        'nonlinearity': {'kind': 'cubic-bistable', 'a': 0.4},
        'delta': 0.1,
        'parameters': {'c1': 1.0, 'c2': 0.21875},
    }
