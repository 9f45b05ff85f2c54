"""Seeded property suites for the algebraic identities (no integrability needed)."""

from __future__ import annotations

import numpy as np

from . import kernel as K
from .forms import Form1, fund_identity_residual
from .report import ResidualReport

KERNEL_TOL = 1e-12


def _rand(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def _worst(res, scale):
    res = np.abs(np.asarray(res))
    scale = np.abs(np.asarray(scale))
    rel = res / np.where(scale > 0, scale, 1.0)
    i = int(np.argmax(rel))
    return float(res.flat[i]), float(scale.flat[i]), float(rel.flat[i])


def _per_sample(x):
    """Max over all but the trailing sample axis."""
    x = np.abs(np.asarray(x))
    return x.reshape(-1, x.shape[-1]).max(axis=0)


def _orthogonal(rng, n):
    from .scenarios import random_rotation

    return np.stack([random_rotation(rng, complex_angles=True) for _ in range(n)], axis=-1)


def kernel_identities(seed: int = 0, samples: int = 1000, tol: float = KERNEL_TOL) -> ResidualReport:
    """The alpha identities on random complex data."""
    rng = np.random.default_rng(seed)
    a, b, c = (_rand(rng, 3, samples) for _ in range(3))
    Aa, Ab = K.alpha(a), K.alpha(b)
    mm = lambda X, Y: np.einsum("ijn,jkn->ikn", X, Y)
    rep = ResidualReport()
    pt = (float(seed), float(samples))

    lhs = K.alpha(K.cross(a, b))
    rhs = mm(Aa, Ab) - mm(Ab, Aa)
    rep.add_triplet("alpha.hom", pt, _worst(_per_sample(lhs - rhs), _per_sample(np.abs(lhs)) + 2 * _per_sample(np.abs(mm(Aa, Ab)))), tol)

    act = np.einsum("ijn,jn->in", Aa, c)
    cx = K.cross(a, c)
    rep.add_triplet("alpha.act", pt, _worst(_per_sample(act - cx), _per_sample(np.abs(act)) + _per_sample(np.abs(cx))), tol)

    tr = 0.5 * np.einsum("jin,jin->n", Aa, Ab)
    d = K.dot(a, b)
    rep.add_triplet("alpha.trace", pt, _worst(tr - d, np.abs(tr) + np.abs(d)), tol)

    R = _orthogonal(rng, samples)
    Rinv = np.einsum("jin->ijn", R)
    lhs = K.alpha(np.einsum("ijn,jn->in", R, a))
    rhs = mm(mm(R, Aa), Rinv)
    rep.add_triplet("alpha.conj", pt, _worst(_per_sample(lhs - rhs), _per_sample(np.abs(lhs)) + _per_sample(np.abs(rhs))), tol)

    back = K.alpha_inv(Aa)
    rep.add_triplet("alpha.inv", pt, _worst(_per_sample(back - a), _per_sample(np.abs(a))), tol)
    return rep


def wedge_identities(seed: int = 0, samples: int = 1000, tol: float = KERNEL_TOL) -> ResidualReport:
    """Both equalities of the fundamental wedge identity and its diagonal case."""
    rng = np.random.default_rng(seed + 1)
    a, b = _rand(rng, 3, samples), _rand(rng, 3, samples)
    om1 = Form1({"u": _rand(rng, 3, samples), "v": _rand(rng, 3, samples)}, "uv")
    om2 = Form1({"u": _rand(rng, 3, samples), "v": _rand(rng, 3, samples)}, "uv")
    rep = ResidualReport()
    pt = (float(seed), float(samples))
    key = ("u", "v")
    lhs, rhs1, rhs2 = (x[key] for x in fund_identity_residual(a, b, om1, om2))
    scale = np.abs(lhs) + np.abs(rhs1) + np.abs(rhs2)
    rep.add_triplet("eq1.first", pt, _worst(lhs - rhs1, scale), tol)
    rep.add_triplet("eq1.second", pt, _worst(lhs - rhs2, scale), tol)
    # om1 = om2: a^T om ^ b^T om = 1/2 (a x b)^T (om x^ om)
    lhs, _, _ = (x[key] for x in fund_identity_residual(a, b, om1, om1))
    ou, ov = om1["u"], om1["v"]
    half = K.dot(K.cross(a, b), K.cross(ou, ov))
    rep.add_triplet("eq1.diagonal", pt, _worst(lhs - half, np.abs(lhs) + np.abs(half)), tol)
    return rep


def correspondence_identities(seed: int = 0, points: int = 6, tol: float = 1e-9, zero_tol: float = 1e-10) -> ResidualReport:
    """Claims that hold for arbitrary tangential V: A=0/B=0, the R1 equivalences, the fourth row combination."""
    from . import correspondence as C
    from .scenarios import random_tangent_field

    rng = np.random.default_rng(seed + 2)
    rep = ResidualReport()
    field = random_tangent_field(seed)
    r1 = []
    for _ in range(points):
        p = (float(rng.uniform(-0.6, 0.6)), float(rng.uniform(-0.6, 0.6)), float(rng.uniform(0.0, 2 * np.pi)))
        f = C.build(field, p, order=5)
        rep.extend(C.abc_checks(f, valid=False, zero_tol=zero_tol))
        rep.add_triplet("L3.4.quad", p, C.l3_fourth_quadratic(f), zero_tol)
        terms = C.r1_terms(f)
        vals = [sum(C._val(t) for t in ts) for ts in terms]
        scales = [sum(abs(C._val(t)) for t in ts) for ts in terms]
        r1.append((p, vals, scales))
    for i, j, cid in ((0, 4, "R1.equiv.1-5"), (1, 3, "R1.equiv.2-4")):
        xs = [v[i] for _, v, _ in r1]
        ys = [v[j] for _, v, _ in r1]
        k, _ = C.fit_proportionality(xs, ys)
        for p, v, s in r1:
            r = abs(v[j] - k * v[i])
            sc = s[j] + abs(k) * s[i]
            rep.add(cid, p, r, sc, r / sc if sc > 0 else r, tol)
    return rep


def identity_suite(seed: int = 0, samples: int = 1000, tol: float | None = None, correspondence: bool = True) -> ResidualReport:
    rep = ResidualReport()
    rep.extend(kernel_identities(seed, samples, tol or KERNEL_TOL))
    rep.extend(wedge_identities(seed, samples, tol or KERNEL_TOL))
    if correspondence:
        rep.extend(correspondence_identities(seed, tol=tol or 1e-9, zero_tol=tol or 1e-10))
    return rep
