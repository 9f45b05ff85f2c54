import numpy as np
import pytest

from contactroll import jets as J
from contactroll.errors import DomainError, NotIsometricError
from contactroll.scenarios import make_isometric_pair, make_surface
from contactroll.surface import gauss_curvature_from_normal, roll, rolling_residuals, surface_jet


@pytest.mark.parametrize("name,K", [("sphere", 1.0), ("tractroid", -1.0), ("plane", 0.0), ("cylinder", 0.0)])
def test_constant_curvature(name, K):
    s = make_surface(name)
    (u0, u1), (v0, v1) = s.domain
    sj = surface_jet(s, 0.6 * u0 + 0.4 * u1, 0.3 * v0 + 0.7 * v1)
    assert abs(sj.K.value - K) < 1e-12
    assert abs(gauss_curvature_from_normal(sj).value - K) < 1e-12


@pytest.mark.parametrize("name", ["tractroid", "catenoid", "ellipsoid", "random_trig"])
def test_jets_match_finite_differences(name, rng):
    s = make_surface(name)
    (u0, u1), (v0, v1) = s.domain
    for _ in range(3):
        u = rng.uniform(u0 + 0.2 * (u1 - u0), u1 - 0.2 * (u1 - u0))
        v = rng.uniform(v0 + 0.2 * (v1 - v0), v1 - 0.2 * (v1 - v0))
        x = surface_jet(s, u, v, order=3).x
        for k in range(3):
            for multi in ((1, 0), (0, 1), (1, 1), (0, 2), (2, 1)):
                fd = J.fd_oracle(lambda p: s.point(p[0], p[1])[k], (u, v), multi)
                assert abs(x[k].partial(multi) - fd) < 1e-6


def test_domain_guard():
    s = make_surface("tractroid")
    with pytest.raises(DomainError):
        surface_jet(s, 0.0, 0.0)


def test_rolling_pair_residuals():
    x0, x = make_isometric_pair("catenoid_helicoid")
    fr = roll(x0, x, 0.4, 0.3)
    res = rolling_residuals(fr)
    assert max(r[2] for r in res.values()) < 1e-10


def test_identity_rolling_is_exactly_zero():
    x0, _ = make_isometric_pair("catenoid_helicoid")
    fr = roll(x0, x0, 0.4, 0.3)
    assert np.all(fr.omega["u"].c == 0) and np.all(fr.omega["v"].c == 0)


def test_rigid_motion_has_zero_connection():
    x0, x = make_isometric_pair("rigid_motion", seed=2)
    fr = roll(x0, x, 0.3, 0.5)
    assert np.max(np.abs(fr.omega["u"].value)) < 1e-12


def test_non_isometric_rejected():
    with pytest.raises(NotIsometricError):
        roll(make_surface("catenoid"), make_surface("cylinder"), 0.4, 0.3)
