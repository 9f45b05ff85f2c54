import numpy as np
import pytest

from contactroll import kernel as K
from contactroll.contact import contact_jet
from contactroll.errors import ConfigError
from contactroll.scenarios import backlund_field, grid_points, make_surface, random_tangent_field, scenario_field


def test_random_field_tangent_and_seeded():
    f1, f2 = random_tangent_field(5), random_tangent_field(5)
    a = contact_jet(f1, 0.2, -0.1, 0.4)
    b = contact_jet(f2, 0.2, -0.1, 0.4)
    assert abs(K.dot(a.N0, a.V).value) < 1e-12
    assert np.array_equal(a.V.c, b.V.c)


@pytest.mark.parametrize("seed,sigma", [("tractroid", 0.6), ("sphere", 0.5j)])
def test_backlund_length_relation(seed, sigma):
    f = backlund_field(seed, sigma)
    cj = contact_jet(f, 0.9 if seed == "tractroid" else 0.3, 0.2, 0.7)
    # mb^2 + |V|^2 = -1/K for the constant-curvature fields
    lhs = cj.mb.value**2 + K.dot(cj.V, cj.V).value
    assert abs(lhs + 1 / cj.sj.K.value) < 1e-12


def test_unknown_names():
    with pytest.raises(ConfigError):
        make_surface("torus")
    with pytest.raises(ConfigError):
        scenario_field("hyperboloid", 0.6)
    with pytest.raises(ConfigError):
        backlund_field("plane", 0.6)


def test_grid_points_order_and_midpoint():
    pts = grid_points(((0, 1), (0, 2), (5, 5)), (2, 3, 1))
    assert len(pts) == 6
    assert pts[0] == (0.0, 0.0, 5.0)
    assert pts[1] == (0.0, 1.0, 5.0)
