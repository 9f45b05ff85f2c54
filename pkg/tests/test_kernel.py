import numpy as np
import pytest

from contactroll import kernel as K
from contactroll.errors import NotInO3Error, SingularMatrixError
from contactroll.identities import kernel_identities, wedge_identities


def test_bilinear_dot_no_conjugation():
    a = np.array([1j, 0, 0])
    assert K.dot(a, a) == -1


def test_alpha_inverse_round_trip(rng):
    x = rng.standard_normal(3) + 1j * rng.standard_normal(3)
    assert np.allclose(K.alpha_inv(K.alpha(x)), x)


def test_alpha_inv_rejects_symmetric():
    with pytest.raises(NotInO3Error):
        K.alpha_inv(np.eye(3))


def test_inverse_singular():
    M = np.array([[1, 2, 3], [2, 4, 6], [0, 1, 0]], dtype=complex)
    with pytest.raises(SingularMatrixError):
        K.inverse(M)


def test_inverse_matches_numpy(rng):
    M = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    assert np.allclose(K.inverse(M), np.linalg.inv(M))


def test_isotropic_vector_cross():
    # (1, i, 0) has zero square length; its cross with itself still vanishes
    n = np.array([1, 1j, 0])
    assert K.sqnorm(n) == 0
    assert np.allclose(K.cross(n, n), 0)


def test_kernel_identity_suite():
    rep = kernel_identities(seed=7, samples=300)
    assert rep.all_passed, [r for r in rep if not r.passed]


def test_wedge_identity_suite():
    rep = wedge_identities(seed=7, samples=300)
    assert rep.all_passed


def test_tolerance_floor_is_a_real_constraint():
    rep = wedge_identities(seed=0, samples=1000, tol=1e-17)
    assert not rep.all_passed
