import numpy as np
import pytest

from contactroll import correspondence as C
from contactroll.errors import FSystemSingular

from conftest import SPHERE_POINT


def test_frame_equations_hold_for_any_constants(keystone_frame, rng):
    for _ in range(5):
        c = rng.standard_normal(3) + 1j * rng.standard_normal(3)
        rep = C.tiom_residuals(keystone_frame, *c)
        assert rep.max_rel < 1e-12


def test_frame_equations_negative_control(keystone_frame):
    rep = C.tiom_residuals(keystone_frame, 0.3, -0.2, 0.5, delta_c6=0.1)
    assert rep.max_rel > 1e-4


def test_rank_structure(keystone_frame):
    assert C.mtcj_checks(keystone_frame).max_rel < 1e-12


def test_fourth_combination_on_random_data(random_frame):
    assert C.l3_fourth_quadratic(random_frame)[2] < 1e-12


def test_r1_keystone(keystone_frame):
    rep = C.r1_residuals(keystone_frame)
    assert len(rep.ids()) == 10
    assert rep.max_rel < 1e-12


def test_r1_fails_on_random_data(random_frame):
    assert C.r1_residuals(random_frame).max_rel > 1e-3


def test_fit_proportionality():
    k, err = C.fit_proportionality([1.0, 2.0, -1.0], [2.5, 5.0, -2.5])
    assert k == pytest.approx(2.5) and err < 1e-15


def test_p1_claims(keystone_frame):
    P1 = C.p1_coefficients(keystone_frame)
    assert len(P1.coeffs) == 15
    rep = C.p1_claims(keystone_frame, P1)
    assert rep.all_passed, [r.check_id for r in rep if not r.passed]


def test_p2_mappings(keystone_frame):
    rep = C.p2_vs_p1(keystone_frame)
    assert rep.all_passed and rep.max_rel < 1e-10


def test_interpolation_exact_on_polynomial():
    def poly(x, y):
        return 1 + 2 * x * y - 3 * x**3 * y + 0.5 * y**4

    P = C.interpolate(lambda x, y: [poly(x, y)], "test")
    assert P.get(3, 1) == pytest.approx(-3)
    assert P.get(0, 4) == pytest.approx(0.5)
    assert abs(P.get(2, 2)) < 1e-12


def test_c4_solution_satisfies_first_relation(keystone_frame):
    c4 = C.c4_solve(keystone_frame, 0.4, -0.3)
    rep = C.tiom_residuals(keystone_frame, 0.4, -0.3, c4)
    assert rep.all_passed


def test_f_system_is_rank_one(keystone_frame):
    D, emb, _ = C.d_eval(keystone_frame, 0.3, -0.2)
    A, _ = C.f_matrix(D, emb, 0.1, 0.4)
    sv = np.linalg.svd(A, compute_uv=False)
    assert sv[1] / sv[0] < 1e-12
    with pytest.raises(FSystemSingular):
        C.f_solve(keystone_frame, 0.3, -0.2, 0.1, 0.4)


def test_displayed_determinant_leading_coefficient(keystone_frame):
    coeffs, claim = C.determinant_leading(keystone_frame)
    # equal magnitude, opposite sign to the stated value
    assert abs(coeffs[4] + claim) < 1e-9 * abs(claim)


def test_abc_zero_claims_on_random_data(random_frame):
    rep = C.abc_checks(random_frame, valid=False)
    zero = [r for r in rep if r.check_id.endswith(("A=0", "B=0"))]
    assert zero and all(r.passed for r in zero)


def test_abc_on_sphere(sphere_field):
    f = C.build(sphere_field, SPHERE_POINT, order=5)
    rep = C.abc_checks(f)
    failing = {r.check_id.split(".")[1] for r in rep if not r.passed}
    assert failing == {"R1-7", "R2-2"}
