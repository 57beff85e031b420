import numpy as np
import pytest

from caustics.curves import circle, confocal_ellipse, ellipse
from caustics.metric import (
    LiouvilleSpec,
    confocal_elliptic,
    control_chart,
    euclidean_cartesian,
    synthetic_liouville,
)


@pytest.fixture(scope="session")
def flat():
    return euclidean_cartesian((-4.0, 4.0, -4.0, 4.0))


@pytest.fixture(scope="session")
def confocal():
    return confocal_elliptic(2.0, 1.0)


@pytest.fixture(scope="session")
def control():
    return control_chart()


def make_synthetic():
    spec = LiouvilleSpec(
        U1=lambda u: u, V1=lambda v: -v * v,
        U2=lambda u: 1.0, V2=lambda v: 1.0,
        u_range=(0.5, 3.0), v_range=(-1.0, 1.0),
        dU1=lambda u: 1.0, dV1=lambda v: -2.0 * v,
        dU2=lambda u: 0.0, dV2=lambda v: 0.0)
    return synthetic_liouville(spec)


@pytest.fixture(scope="session")
def synthetic():
    return make_synthetic()


@pytest.fixture(scope="session")
def unit_circle(flat):
    return circle(flat, (0.0, 0.0), 1.0)


@pytest.fixture(scope="session")
def ellipse_table(flat):
    return ellipse(flat, (2.0, 1.0))


@pytest.fixture(scope="session")
def ellipse_caustic(flat):
    # the confocal ellipse lam = 0 of the (a, b) = (2, 1) family
    return confocal_ellipse(flat, 2.0, 1.0, 0.0)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
