import numpy as np
import pytest

from contactroll import forms
from contactroll import jets as J
from contactroll.forms import Form1, FormError
from contactroll.jets import JetSpec


def _coords(order=3):
    spec = JetSpec.total(("u", "v"), order)
    return J.seed_variable(spec, "u", 0.3), J.seed_variable(spec, "v", -0.2)


def test_dd_is_zero():
    u, v = _coords()
    f = J.sin(u) * J.exp(v) + u * u * v
    dd = forms.ext_d(forms.ext_d(f))
    assert abs(dd[("u", "v")].value) < 1e-14


def test_wedge_antisymmetric(rng):
    a = Form1({"u": rng.standard_normal(3), "v": rng.standard_normal(3)}, "uv")
    b = Form1({"u": rng.standard_normal(3), "v": rng.standard_normal(3)}, "uv")
    ab = forms.cross_wedge(a, b)[("u", "v")]
    ba = forms.cross_wedge(b, a)[("u", "v")]
    assert np.allclose(ab, ba)  # cross and wedge both flip sign


def test_residual_relative_convention():
    a, s, r = forms.residual([1.0, -1.0 + 1e-9], combine="ratio")
    assert a == pytest.approx(1e-9)
    assert r == pytest.approx(5e-10)


def test_ext_d_needs_jets():
    with pytest.raises(FormError):
        forms.ext_d(np.ones(3))
