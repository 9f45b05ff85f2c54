import numpy as np
import pytest

from contactroll import correspondence as C
from contactroll.scenarios import backlund_field, random_tangent_field

KEYSTONE_POINT = (0.9, 0.2, 0.7)
SPHERE_POINT = (0.3, 0.2, 0.7)


@pytest.fixture(scope="session")
def keystone_field():
    return backlund_field("tractroid", 0.6)


@pytest.fixture(scope="session")
def sphere_field():
    return backlund_field("sphere", 0.5j)


@pytest.fixture(scope="session")
def keystone_frame(keystone_field):
    return C.build(keystone_field, KEYSTONE_POINT, order=5)


@pytest.fixture(scope="session")
def random_frame():
    return C.build(random_tangent_field(3), (0.1, -0.2, 0.9), order=5)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
