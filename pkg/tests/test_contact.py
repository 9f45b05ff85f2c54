import numpy as np
import pytest

from contactroll import contact as Ct
from contactroll.errors import ZeroMError
from contactroll.scenarios import random_tangent_field, tangent_perturbation
from contactroll.suite import tangential_omega

from conftest import KEYSTONE_POINT, SPHERE_POINT


def test_keystone_integrability(keystone_field):
    cj = Ct.contact_jet(keystone_field, *KEYSTONE_POINT)
    rep = Ct.integrability_residuals(cj)
    assert rep.all_passed and rep.max_rel < 1e-12
    assert Ct.consistency_residual(cj)[2] < 1e-12


def test_sphere_integrability(sphere_field):
    cj = Ct.contact_jet(sphere_field, *SPHERE_POINT)
    assert Ct.integrability_residuals(cj).max_rel < 1e-12


def test_random_field_violates_second_line():
    cj = Ct.contact_jet(random_tangent_field(1, derive_m=True), 0.2, 0.1, 0.5)
    terms = Ct.integrability_terms(cj)
    from contactroll.forms import residual

    # line 1 holds by construction of mb, line 2 generically fails
    assert residual(terms["eq4.line1"])[2] < 1e-12
    assert residual(terms["eq4.line2"])[2] > 1e-4


def test_perturbation_breaks_integrability(keystone_field):
    cj = Ct.contact_jet(keystone_field, *KEYSTONE_POINT, perturb=tangent_perturbation(1e-2))
    assert Ct.integrability_residuals(cj).max_rel > 1e-4


@pytest.mark.parametrize("tangential", [False, True])
def test_leaf_condition_with_dw_substituted(keystone_field, tangential):
    cj = Ct.contact_jet(keystone_field, *KEYSTONE_POINT)
    om = tangential_omega(cj, np.random.default_rng(0)) if tangential else None
    dw = Ct.dw_form(cj, om)
    trip, _ = Ct.leaf_condition_residual(cj, om, dw)
    assert trip[2] < 1e-13
    # a wrong dw leaves a residual
    trip, _ = Ct.leaf_condition_residual(cj, om, dw * 1.01)
    assert trip[2] > 1e-6


def test_zero_mb_rejected():
    f = random_tangent_field(0)
    f0 = Ct.ContactField(f.name, f.seed, f.V_rule, lambda sj, W: 0.0)
    with pytest.raises(ZeroMError):
        Ct.contact_jet(f0, 0.1, 0.1, 0.1)


def test_small_leaf_is_path_independent(keystone_field):
    us = np.linspace(0.8, 1.0, 5)
    vs = np.linspace(-0.1, 0.1, 5)
    mesh = Ct.leaf_integrate(keystone_field, 4.0, us, vs)
    assert mesh.error is None
    assert mesh.path_gap < 1e-8
    rows = list(mesh.rows())
    assert len(rows) == 25 and len(rows[0]) == 9
