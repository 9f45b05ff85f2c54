"""Isometric correspondence of leaves: the solved connection frame and its cascade.

Naming follows the frame decomposition

    om_u = c1 a + c2 b + u1
    om_v = -c1 b + c4 a + v1
    om_w = c1 (Vt a + Ut b) + c2 Vt b - c4 Ut a + w1

with ``a``, ``b`` the coefficient vectors of ``c1`` in ``om_u`` and ``om_v``,
``Ut``, ``Vt`` the two fibre ratios and ``C[k, j]`` the coefficient vector of
the monomial ``j`` (``"0"``, ``"1"``, ``"2"``, ``"4"``, ``"124"`` for 1, c1, c2,
c4, c1^2 + c2 c4) in the ``k``-th flatness condition.

Every relation is returned as a list of additive terms so that its relative
residual is ``|sum| / sum |terms|``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from . import forms
from . import jets as J
from . import kernel as K
from .contact import ContactField, ContactJet, contact_jet
from .errors import C4PoleError, ContactRollError, FrameDenominatorError, FSystemSingular, InterpolationError
from .forms import Form1
from .jets import Jet, JetSpec
from .report import ResidualReport

DENOM_THRESHOLD = 1e-12
MONOMIALS = ("0", "1", "2", "4", "124")
UVW = ("u", "v", "w")


def _val(x) -> complex:
    return complex(x.value) if isinstance(x, Jet) else complex(x)


def rel_of(terms) -> tuple[float, float, float]:
    """(|sum|, sum |terms|, ratio) of a list of scalar terms (jets or numbers)."""
    vals = [_val(t) for t in terms]
    r = abs(sum(vals))
    s = sum(abs(v) for v in vals)
    return r, s, (r / s if s > 0 else r)


def _guard(name, x):
    if abs(_val(x)) < DENOM_THRESHOLD:
        raise FrameDenominatorError(name, _val(x))


@dataclass
class CorrFrame:
    cj: ContactJet
    N0: Jet
    V: Jet
    Vw: Jet
    mb: Jet
    m: Jet
    U: Jet
    Vs: Jet
    n: Jet
    Ut: Jet
    Vt: Jet
    M: Jet
    a: Jet
    b: Jet
    u1: Jet
    v1: Jet
    w1: Jet
    C: dict = field(default_factory=dict)

    @property
    def point(self):
        return self.cj.point

    @property
    def spec(self) -> JetSpec:
        return self.cj.spec

    # shorthand dot products used everywhere
    def mC(self, k, j) -> Jet:
        return K.dot(self.m, self.C[k, j])

    def UxN(self) -> Jet:
        return K.cross(self.U, self.N0)

    def VxN(self) -> Jet:
        return K.cross(self.Vs, self.N0)

    def VwxN(self) -> Jet:
        return K.cross(self.Vw, self.N0)

    def omega(self, c1, c2, c4):
        """(om_u, om_v, om_w) for constant or jet-valued c's."""
        a, b, Ut, Vt = self.a, self.b, self.Ut, self.Vt
        om_u = a * c1 + b * c2 + self.u1
        om_v = b * (-c1) + a * c4 + self.v1
        om_w = (a * Vt + b * Ut) * c1 + b * Vt * c2 - a * Ut * c4 + self.w1
        return om_u, om_v, om_w


def _tan(N0, X):
    """(N0 x X) x N0, the tangential part of X."""
    return K.cross(K.cross(N0, X), N0)


def frame_build(cj: ContactJet) -> CorrFrame:
    """Solve the connection frame and its C-vectors at the contact jet's point.

    With jets of order ``n`` in (u, v, w) the frame pieces are exact to order
    ``n - 2`` and the C-vectors to order ``n - 3``.
    """
    sj = cj.sj
    N0, V, mb = cj.N0, cj.V, cj.mb
    Vw = V.diff("w")
    U, Vs = cj.U, cj.Vv
    _guard("mb", mb)
    n = K.triple(N0, U, Vs)
    _guard("N0^T(U x V)", n)
    _guard("N0^T(d_wV x V)", K.triple(N0, Vw, V))
    Nu, Nv = sj.Nu, sj.Nv
    Vu, Vv = V.diff("u"), V.diff("v")
    rmb = J.reciprocal(mb)
    rn = J.reciprocal(n)
    Ut = K.triple(N0, Vw, U) * rn
    Vt = K.triple(N0, Vw, Vs) * rn
    KN = K.triple(N0, Nu, Nv)
    M = rmb * (-0.5) + (K.dot(Nu, Vv) - K.dot(Nv, Vu) - mb * KN) * (0.5 * rn)
    sU = K.triple(N0, V, U) * rmb
    sV = K.triple(N0, V, Vs) * rmb
    tU, tV = _tan(N0, U), _tan(N0, Vs)
    a = tU + N0 * sU
    b = tV + N0 * sV
    H = -(K.cross(N0, V) * KN) + Nu * sV - Nv * sU
    u1 = (tU - N0 * sU) * M + N0 * (K.dot(U, H) * rn)
    v1 = (tV - N0 * sV) * M + N0 * (K.dot(Vs, H) * rn)
    NuVw, NvVw = K.dot(Nu, Vw), K.dot(Nv, Vw)
    nVwU, nVwV = K.triple(N0, Vw, U), K.triple(N0, Vw, Vs)
    w1 = (
        -(tU * ((M * nVwV + NvVw + nVwV * rmb) * rn))
        + tV * ((M * nVwU + NuVw + nVwU * rmb) * rn)
        + N0 * (M * K.triple(N0, Vw, V) * rmb + NuVw * rn * sV - NvVw * rn * sU)
    )
    m = cj.m
    f = CorrFrame(cj, N0, V, Vw, mb, m, U, Vs, n, Ut, Vt, M, a, b, u1, v1, w1)
    f.C = c_vectors(f)
    return f


def c_vectors(f: CorrFrame) -> dict:
    a, b, u1, v1, w1, Ut, Vt = f.a, f.b, f.u1, f.v1, f.w1, f.Ut, f.Vt
    d = lambda x, s: x.diff(s)
    X = a * Vt + b * Ut
    axb = K.cross(a, b)
    C = {}
    C[1, "0"] = d(v1, "u") - d(u1, "v") + K.cross(u1, v1)
    C[1, "1"] = -d(b, "u") - d(a, "v") + K.cross(a, v1) - K.cross(u1, b)
    C[1, "2"] = -d(b, "v") + K.cross(b, v1)
    C[1, "4"] = d(a, "u") + K.cross(u1, a)
    C[1, "124"] = -axb
    C[2, "0"] = d(w1, "u") - d(u1, "w") + K.cross(u1, w1)
    C[2, "1"] = d(X, "u") - d(a, "w") + K.cross(a, w1) + K.cross(u1, X)
    C[2, "2"] = d(b * Vt, "u") - d(b, "w") + K.cross(b, w1) + K.cross(u1, b) * Vt
    C[2, "4"] = -(d(a * Ut, "u") + K.cross(u1, a) * Ut)
    C[2, "124"] = axb * Ut
    C[3, "0"] = d(v1, "w") - d(w1, "v") + K.cross(w1, v1)
    C[3, "1"] = -d(b, "w") - d(X, "v") + K.cross(X, v1) - K.cross(w1, b)
    C[3, "2"] = -d(b * Vt, "v") + K.cross(b, v1) * Vt
    C[3, "4"] = d(a, "w") + d(a * Ut, "v") - K.cross(a, v1) * Ut + K.cross(w1, a)
    C[3, "124"] = -(axb * Vt)
    return C


def build(field_: ContactField, point, order: int = 4, **kw) -> CorrFrame:
    u, v, w = point
    return frame_build(contact_jet(field_, u, v, w, order=order, **kw))


# -- invariants of the frame --------------------------------------------------------

def w1_closed_form(f: CorrFrame) -> Jet:
    """The compact expression of w1 in terms of a and b."""
    sj = f.cj.sj
    rn = J.reciprocal(f.n)
    rmb = J.reciprocal(f.mb)
    NuVw, NvVw = K.dot(sj.Nu, f.Vw), K.dot(sj.Nv, f.Vw)
    return (
        -(f.a * (f.M * f.Vt + NvVw * rn + f.Vt * rmb))
        + f.b * (f.M * f.Ut + NuVw * rn + f.Ut * rmb)
        - f.N0 * (K.triple(f.N0, f.Vw, f.V) * rmb * rmb)
    )


def flatness(f: CorrFrame, c1, c2, c4):
    """The three flatness conditions of (om_u, om_v, om_w) as Cx3 jets."""
    ou, ov, ow = f.omega(c1, c2, c4)
    d = lambda x, s: x.diff(s)
    return (
        d(ov, "u") - d(ou, "v") + K.cross(ou, ov),
        d(ow, "u") - d(ou, "w") + K.cross(ou, ow),
        d(ov, "w") - d(ow, "v") + K.cross(ow, ov),
    )


def c_polynomial(f: CorrFrame, k: int, c1, c2, c4):
    """C^k(c) = C0 + c1 C1 + c2 C2 + c4 C4 + (c1^2 + c2 c4) C124."""
    C = f.C
    return C[k, "0"] + C[k, "1"] * c1 + C[k, "2"] * c2 + C[k, "4"] * c4 + C[k, "124"] * (c1 * c1 + c2 * c4)


def tiom_terms(f: CorrFrame, c1, c2, c4, delta_c6: complex = 0.0) -> dict:
    """Additive terms of the four frame equations for constant c's.

    ``delta_c6`` shifts the coefficient of (N0 x U) x N0 in om_w away from its
    solved value (negative control).
    """
    cj = f.cj
    N0, V, Vw, mb = f.N0, f.V, f.Vw, f.mb
    ou, ov, ow = f.omega(c1, c2, c4)
    if delta_c6:
        ow = ow + _tan(N0, f.U) * delta_c6
    om = Form1({"u": ou, "v": ov}, "uv")
    dY = cj.dY()
    dV = cj.dV()
    dN = cj.dN0()
    rmb = J.reciprocal(mb)
    uv = ("u", "v")
    # first: scalar 2-form
    t1 = [
        forms.pair_form2(forms.cross_wedge(om, dY), N0)[uv],
        -forms.wedge(dN, dV, "dot")[uv],
        forms.pair_form2(forms.cross_wedge(dY, dY), N0)[uv] * (0.5 * rmb),
        forms.pair_form2(forms.cross_wedge(dN, dN), N0)[uv] * (0.5 * mb),
    ]
    # second: vector 2-form
    sVdY = dY.map(lambda c: K.triple(N0, V, c) * rmb)
    t2 = [
        -forms.wedge(om.map(lambda c: K.dot(c, N0)), dY.map(lambda c: K.cross(c, N0)), lambda s, x: x * s)[uv],
        forms.wedge(om.map(lambda c: K.cross(c, N0)), sVdY, lambda x, s: x * s)[uv],
        -(K.cross(N0, V) * (0.5 * forms.pair_form2(forms.cross_wedge(dN, dN), N0)[uv])),
        forms.wedge(dN, sVdY, lambda x, s: x * s)[uv],
    ]
    # third: scalar 1-form, per direction
    reg = K.triple(N0, Vw, V)
    t3 = {
        d: [
            K.triple(N0, ow, dY[d]),
            -K.triple(N0, om[d], Vw),
            K.dot(dN[d], Vw),
            K.triple(N0, Vw, dY[d]) * rmb,
        ]
        for d in uv
    }
    t4 = {
        d: [
            -(K.cross(dY[d], N0) * K.dot(ow, N0)),
            K.cross(ow, N0) * sVdY[d],
            -(K.cross(N0, Vw) * K.dot(om[d], N0)),
            (K.cross(om[d], N0) + dN[d]) * (reg * rmb),
        ]
        for d in uv
    }
    return {"tiom.1": t1, "tiom.2": t2, "tiom.3": t3, "tiom.4": t4}


def _vec_rel(terms):
    vals = [np.asarray(t.value if isinstance(t, Jet) else t) for t in terms]
    r = np.abs(sum(vals))
    s = sum(np.abs(v) for v in vals)
    i = int(np.argmax(r / np.where(s > 0, s, 1.0))) if r.ndim else 0
    rr, ss = float(np.ravel(r)[i]), float(np.ravel(s)[i])
    return rr, ss, (rr / ss if ss > 0 else rr)


def _worst(triplets):
    return max(triplets, key=lambda t: t[2])


def tiom_residuals(f: CorrFrame, c1, c2, c4, delta_c6: complex = 0.0, tol: float = 1e-8) -> ResidualReport:
    rep = ResidualReport()
    T = tiom_terms(f, c1, c2, c4, delta_c6)
    rep.add_triplet("tiom.1", f.point, rel_of(T["tiom.1"]), tol)
    rep.add_triplet("tiom.2", f.point, _vec_rel(T["tiom.2"]), tol)
    rep.add_triplet("tiom.3", f.point, _worst([rel_of(T["tiom.3"][d]) for d in ("u", "v")]), tol)
    rep.add_triplet("tiom.4", f.point, _worst([_vec_rel(T["tiom.4"][d]) for d in ("u", "v")]), tol)
    return rep


# -- rank structure -------------------------------------------------------------------

def l3_rows(f: CorrFrame, c1, c2, c4):
    """Inhomogeneous parts of the nine scalar rows (rows 1,2,4,5,7,8 divided by n)."""
    rn = J.reciprocal(f.n)
    UxN, VxN = f.UxN(), f.VxN()
    rows = []
    for k in (1, 2, 3):
        E = c_polynomial(f, k, c1, c2, c4)
        rows += [K.dot(UxN, E) * rn, K.dot(VxN, E) * rn, K.dot(f.N0, E)]
    return rows


def l3_combinations(f: CorrFrame, c1, c2, c4):
    """The four vanishing row combinations applied to the inhomogeneous parts."""
    L = l3_rows(f, c1, c2, c4)
    sV = K.triple(f.N0, f.V, f.Vs) / f.mb
    sU = K.triple(f.N0, f.V, f.U) / f.mb
    return [
        [L[2], sV * L[0], -(sU * L[1])],
        [L[5], sV * L[3], -(sU * L[4])],
        [L[8], sV * L[6], -(sU * L[7])],
        [L[6], L[4], -(f.Vt * L[0]), f.Ut * L[1]],
    ]


def _quad_coeff(fn):
    """Coefficient of the monomial (c1^2 + c2 c4) of an expression quadratic in c's."""
    # c1 = t, c2 = c4 = 0 isolates c1^2 together with the linear c1 part
    p1 = fn(1.0, 0.0, 0.0)
    m1 = fn(-1.0, 0.0, 0.0)
    z = fn(0.0, 0.0, 0.0)
    return [(a + b) * 0.5 - c for a, b, c in zip(p1, m1, z)]


def mtcj_terms(f: CorrFrame) -> dict:
    out = {}
    for j in ("0", "1", "2", "4"):
        out[f"mtcj.2.{j}"] = [f.mC(2, j), f.Ut * f.mC(1, j)]
        out[f"mtcj.3.{j}"] = [f.mC(3, j), -(f.Vt * f.mC(1, j))]
        out[f"mtcj.t.{j}"] = [
            -K.dot(f.VwxN(), f.C[1, j]),
            K.dot(f.UxN(), f.C[3, j]),
            K.dot(f.VxN(), f.C[2, j]),
        ]
    return out


def mtcj_checks(f: CorrFrame, c_samples=((0.3, -0.7, 0.5), (1.1, 0.4, -0.9)), tol: float = 1e-7) -> ResidualReport:
    rep = ResidualReport()
    for cid, terms in mtcj_terms(f).items():
        rep.add_triplet(cid, f.point, rel_of(terms), tol)
    # quadratic coefficient of the first combination
    q = _quad_coeff(lambda c1, c2, c4: [sum(t[1:], t[0]) for t in l3_combinations(f, c1, c2, c4)])
    mm = K.dot(f.m, f.m)
    expected = -(mm / (f.mb * f.mb)) * f.n
    rep.add_triplet("L3.quad.1", f.point, rel_of([q[0], -expected]), tol)
    expected2 = (mm / (f.mb * f.mb)) * K.triple(f.N0, f.Vw, f.U)
    rep.add_triplet("L3.quad.2", f.point, rel_of([q[1], -expected2]), tol)
    expected3 = -(mm / (f.mb * f.mb)) * K.triple(f.N0, f.Vw, f.Vs)
    rep.add_triplet("L3.quad.3", f.point, rel_of([q[2], -expected3]), tol)
    # proportionality of the second and third combinations to the first
    for c1, c2, c4 in c_samples:
        L = [sum(t[1:], t[0]) for t in l3_combinations(f, c1, c2, c4)]
        rep.add_triplet("L3.prop.2", f.point, rel_of([L[1], f.Ut * L[0]]), tol)
        rep.add_triplet("L3.prop.3", f.point, rel_of([L[2], -(f.Vt * L[0])]), tol)
    return rep


def l3_fourth_quadratic(f: CorrFrame):
    """(|quadratic coefficient|, scale, rel) of the fourth combination."""
    parts = _quad_coeff(lambda c1, c2, c4: l3_combinations(f, c1, c2, c4)[3])
    return rel_of(parts)


# -- R1 -------------------------------------------------------------------------------------

def r1_terms(f: CorrFrame) -> list:
    """Additive terms of the ten R1 relations, in display order."""
    m, a, b, u1, v1, w1, Ut, Vt = f.m, f.a, f.b, f.u1, f.v1, f.w1, f.Ut, f.Vt
    d = lambda x, s: x.diff(s)
    cx = K.cross
    md = lambda x: K.dot(m, x)
    X = a * Vt + b * Ut
    vc1 = -b
    P, XN, YN = f.VwxN(), f.VxN(), f.UxN()
    r = []
    r.append([Vt * md(d(a, "u")), -(Ut * md(d(a, "v"))), -md(d(a, "w")), md(cx(a, w1)), md(cx(u1, X)),
              Ut * md(cx(a, v1)), -(Ut * md(cx(u1, b)))])
    r.append([Vt * md(d(b, "u")), -(Ut * md(d(b, "v"))), -md(d(b, "w")), md(cx(b, w1)), Vt * md(cx(u1, b)),
              Ut * md(cx(b, v1))])
    r.append([md(d(w1, "u")), -md(d(u1, "w")), md(cx(u1, w1)), Ut * md(d(v1, "u")), -(Ut * md(d(u1, "v"))),
              Ut * md(cx(u1, v1))])
    r.append([Vt * md(d(b, "u")), -(Ut * md(d(b, "v"))), -md(d(b, "w")), md(cx(X, v1)), md(cx(w1, vc1)),
              -(Vt * md(cx(a, v1))), Vt * md(cx(u1, b))])
    r.append([Vt * md(d(a, "u")), -(Ut * md(d(a, "v"))), -md(d(a, "w")), -(Ut * md(cx(v1, a))), md(cx(a, w1)),
              Vt * md(cx(u1, a))])
    r.append([md(d(v1, "w")), -md(d(w1, "v")), md(cx(w1, v1)), -(Vt * md(d(v1, "u"))), Vt * md(d(u1, "v")),
              -(Vt * md(cx(u1, v1)))])
    p, x, y = (lambda z: K.dot(P, z)), (lambda z: K.dot(XN, z)), (lambda z: K.dot(YN, z))
    r.append([
        p(d(b, "u")), p(d(a, "v")), -p(cx(a, v1)), p(cx(u1, b)),
        x(d(a * Vt, "u")), Ut * x(d(b, "u")), -x(d(a, "w")), x(cx(a, w1)), x(cx(u1, X)),
        -y(d(b, "w")), -(Vt * y(d(a, "v"))), -y(d(b * Ut, "v")), y(cx(X, v1)), -y(cx(w1, b)),
    ])
    r.append([
        p(d(b, "v")), -p(cx(b, v1)),
        Vt * x(d(b, "u")), -x(d(b, "w")), x(cx(b, w1)), Vt * x(cx(u1, b)),
        -y(d(b * Vt, "v")), Vt * y(cx(b, v1)),
    ])
    r.append([
        -p(d(a, "u")), -p(cx(u1, a)),
        -x(d(a * Ut, "u")), -(Ut * x(cx(u1, a))),
        y(d(a, "w")), Ut * y(d(a, "v")), -(Ut * y(cx(a, v1))), y(cx(w1, a)),
    ])
    r.append([
        -p(d(v1, "u")), p(d(u1, "v")), -p(cx(u1, v1)),
        x(d(w1, "u")), -x(d(u1, "w")), x(cx(u1, w1)),
        y(d(v1, "w")), -y(d(w1, "v")), y(cx(w1, v1)),
    ])
    return r


def r1_values(f: CorrFrame) -> list:
    return [complex(sum(_val(t) for t in terms)) for terms in r1_terms(f)]


def r1_residuals(f: CorrFrame, tol: float = 1e-7) -> ResidualReport:
    rep = ResidualReport()
    for i, terms in enumerate(r1_terms(f), start=1):
        rep.add_triplet(f"R1.{i}", f.point, rel_of(terms), tol)
    return rep


def fit_proportionality(xs, ys):
    """Least-squares k with y ~ k x; returns (k, max |y - k x| / max(|x|, |y|))."""
    xs = np.asarray(xs, dtype=complex)
    ys = np.asarray(ys, dtype=complex)
    den = np.vdot(xs, xs)
    k = np.vdot(xs, ys) / den if abs(den) > 0 else 0.0
    scale = max(np.max(np.abs(xs)), np.max(np.abs(ys)), 1e-300)
    return complex(k), float(np.max(np.abs(ys - k * xs)) / scale)


# -- the five independent equations and c4 ----------------------------------------

def pauc1_terms(f: CorrFrame, c1, c2, c4, dc: dict) -> list:
    """Terms of the five independent first-order equations.

    ``dc`` maps names like ``"c1_u"`` to values of the derivatives.
    """
    rn = J.reciprocal(f.n)
    E = [None] + [c_polynomial(f, k, c1, c2, c4) for k in (1, 2, 3)]
    EU = [None] + [K.dot(f.UxN(), E[k]) * rn for k in (1, 2, 3)]
    EV = [None] + [K.dot(f.VxN(), E[k]) * rn for k in (1, 2, 3)]
    Ut, Vt = f.Ut, f.Vt
    g = dc.get
    return [
        [g("c1_u"), g("c2_v"), EU[1]],
        [g("c1_v"), -g("c4_u"), -EV[1]],
        [g("c2_w"), g("c2_v") * Ut, EU[1] * Ut, -g("c2_u") * Vt, EU[2]],
        [g("c1_w"), g("c2_v") * Vt, EU[1] * Vt, g("c4_u") * Ut, -EV[2]],
        [g("c4_w"), -g("c4_u") * Vt, -EV[1] * Vt, g("c4_v") * Ut, EV[3]],
    ]


def pauc1_system(f: CorrFrame, c1, c2, c4, dc: dict, tol: float = 1e-6) -> ResidualReport:
    rep = ResidualReport()
    for i, terms in enumerate(pauc1_terms(f, c1, c2, c4, dc), start=1):
        rep.add_triplet(f"pauc1.{i}", f.point, rel_of(terms), tol)
    return rep


def c4_parts(f: CorrFrame, c1, c2):
    num = f.mC(1, "0") + f.mC(1, "1") * c1 + f.mC(1, "2") * c2 + f.mC(1, "124") * (c1 * c1)
    den = f.mC(1, "4") + f.mC(1, "124") * c2
    return num, den


def c4_solve(f: CorrFrame, c1, c2):
    """c4 from the first rank relation; raises :class:`C4PoleError` at its pole."""
    num, den = c4_parts(f, c1, c2)
    if abs(_val(den)) < DENOM_THRESHOLD * (1.0 + abs(_val(f.mC(1, "4")))):
        raise C4PoleError(_val(den))
    return -num / den


# -- embedding the frame into jets with c-variables --------------------------------------

def c_spec(uvw_order: int, c_order: int, extra: tuple = (), extra_order: int = 1) -> JetSpec:
    groups = [(UVW, uvw_order), (("c1", "c2"), c_order)]
    if extra:
        groups.append((extra, extra_order))
    return JetSpec.product(*groups)


class Embedded:
    """Frame quantities re-expressed in a spec with auxiliary variables."""

    def __init__(self, f: CorrFrame, spec: JetSpec):
        self.f = f
        self.spec = spec
        e = lambda x: x.embed(spec)
        self.C = {k: e(v) for k, v in f.C.items()}
        self.m = e(f.m)
        self.Ut = e(f.Ut)
        self.Vt = e(f.Vt)
        self.n = e(f.n)
        self.rn = J.reciprocal(self.n)
        self.UxN = e(f.UxN())
        self.VxN = e(f.VxN())
        self.mCs = {k: K.dot(self.m, v) for k, v in self.C.items() if k[0] == 1}

    def mC(self, j):
        return self.mCs[1, j]

    def cpoly(self, k, c1, c2, c4):
        C = self.C
        return C[k, "0"] + C[k, "1"] * c1 + C[k, "2"] * c2 + C[k, "4"] * c4 + C[k, "124"] * (c1 * c1 + c2 * c4)

    def EUV(self, c1, c2, c4):
        EU, EV = {}, {}
        for k in (1, 2, 3):
            E = self.cpoly(k, c1, c2, c4)
            EU[k] = K.dot(self.UxN, E) * self.rn
            EV[k] = K.dot(self.VxN, E) * self.rn
        return EU, EV


def _tot(x: Jet, var: str, dc1, dc2):
    """Total derivative along ``var`` of a jet in (u, v, w, c1, c2)."""
    return x.diff(var) + x.diff("c1") * dc1 + x.diff("c2") * dc2


# -- P1 / P2 ---------------------------------------------------------------------------------

P1_SPEC = c_spec(1, 1)


def p1_terms(f: CorrFrame, c1: complex, c2: complex, p: complex = 0.0, q: complex = 0.0, emb: Embedded | None = None):
    """Additive terms of the c4-equation after eliminating c4, times the clearing factor.

    ``p``, ``q`` are the free values of d_u c2, d_v c2; the sum does not depend
    on them.
    """
    emb = emb or Embedded(f, P1_SPEC)
    spec = emb.spec
    C1 = J.seed_variable(spec, "c1", c1)
    C2 = J.seed_variable(spec, "c2", c2)
    num = emb.mC("0") + emb.mC("1") * C1 + emb.mC("2") * C2 + emb.mC("124") * (C1 * C1)
    den = emb.mC("4") + emb.mC("124") * C2
    if abs(den.value) < DENOM_THRESHOLD:
        raise C4PoleError(den.value)
    c4 = -num / den
    EU, EV = emb.EUV(C1, C2, c4)
    Ut, Vt = emb.Ut.value, emb.Vt.value
    c4_1, c4_2 = c4.diff("c1").value, c4.diff("c2").value
    eu = {k: EU[k].value for k in EU}
    ev = {k: EV[k].value for k in EV}
    c1_u = -q - eu[1]
    c4_u = c4.diff("u").value + c4_1 * c1_u + c4_2 * p
    c1_v = c4_u + ev[1]
    c4_v = c4.diff("v").value + c4_1 * c1_v + c4_2 * q
    c2_w = (-q - eu[1]) * Ut + p * Vt - eu[2]
    c1_w = -(q + eu[1]) * Vt - c4_u * Ut + ev[2]
    scale = den.value**3 * emb.n.value
    terms = [
        c4.diff("w").value, c4_1 * c1_w, c4_2 * c2_w,
        -c4_u * Vt, -ev[1] * Vt, c4_v * Ut, ev[3],
    ]
    return [t * scale for t in terms]


def p2_terms(f: CorrFrame, c1: complex, c4: complex, p: complex = 0.0, q: complex = 0.0, emb: Embedded | None = None):
    """As :func:`p1_terms` with the roles of c2 and c4 exchanged (c4 free, c2 solved).

    The auxiliary jet variable named ``c2`` carries c4 here.
    """
    emb = emb or Embedded(f, P1_SPEC)
    spec = emb.spec
    C1 = J.seed_variable(spec, "c1", c1)
    C4 = J.seed_variable(spec, "c2", c4)
    num = emb.mC("0") + emb.mC("1") * C1 + emb.mC("4") * C4 + emb.mC("124") * (C1 * C1)
    den = emb.mC("2") + emb.mC("124") * C4
    if abs(den.value) < DENOM_THRESHOLD:
        raise C4PoleError(den.value)
    c2 = -num / den
    EU, EV = emb.EUV(C1, c2, C4)
    Ut, Vt = emb.Ut.value, emb.Vt.value
    c2_1, c2_4 = c2.diff("c1").value, c2.diff("c2").value
    eu = {k: EU[k].value for k in EU}
    ev = {k: EV[k].value for k in EV}
    c1_v = p + ev[1]
    c2_v = c2.diff("v").value + c2_1 * c1_v + c2_4 * q
    c1_u = -c2_v - eu[1]
    c2_u = c2.diff("u").value + c2_1 * c1_u + c2_4 * p
    c1_w = -(c2_v + eu[1]) * Vt - p * Ut + ev[2]
    c4_w = (p + ev[1]) * Vt - q * Ut - ev[3]
    scale = den.value**3 * emb.n.value
    terms = [
        c2.diff("w").value, c2_1 * c1_w, c2_4 * c4_w,
        c2_v * Ut, eu[1] * Ut, -c2_u * Vt, eu[2],
    ]
    return [t * scale for t in terms]


NODES = np.arange(-2, 3, dtype=float)
EXPONENTS = [(i, j) for i in range(5) for j in range(5)]
QUARTIC = [(i, j) for i, j in EXPONENTS if i + j <= 4]


@dataclass
class PolyCoeffs:
    """Coefficients of a bivariate quartic ``sum c[i, j] x^i y^j`` and their term scales."""

    coeffs: dict
    scales: dict
    high: float
    denominator: str
    variables: tuple = ("c1", "c2")

    def __call__(self, x, y):
        return sum(c * x**i * y**j for (i, j), c in self.coeffs.items())

    def get(self, i, j):
        return self.coeffs.get((i, j), 0j)

    def scale(self, i, j):
        return self.scales.get((i, j), 0.0)

    def label(self, i, j):
        a, b = self.variables
        parts = []
        if i:
            parts.append(a if i == 1 else f"{a}^{i}")
        if j:
            parts.append(b if j == 1 else f"{b}^{j}")
        return "*".join(parts) or "1"


_VAND = None


def _vandermonde():
    global _VAND
    if _VAND is None:
        rows = []
        for x, y in itertools.product(NODES, NODES):
            rows.append([x**i * y**j for i, j in EXPONENTS])
        A = np.array(rows)
        if np.linalg.cond(A) > 1e8:
            raise InterpolationError("ill-conditioned interpolation nodes")
        _VAND = np.linalg.inv(A)
    return _VAND


def interpolate(fn, denominator: str, variables=("c1", "c2")) -> PolyCoeffs:
    """Coefficients of ``fn(x, y)`` (a list of additive terms) on the 5x5 integer grid."""
    samples = [fn(x, y) for x, y in itertools.product(NODES, NODES)]
    T = np.array(samples, dtype=complex)  # (25, nterms)
    Ainv = _vandermonde()
    per_term = Ainv @ T  # (25, nterms)
    total = per_term.sum(axis=1)
    abs_scale = np.abs(per_term).sum(axis=1)
    coeffs = {e: complex(total[k]) for k, e in enumerate(EXPONENTS) if e in QUARTIC}
    scales = {e: float(abs_scale[k]) for k, e in enumerate(EXPONENTS) if e in QUARTIC}
    big = max(abs_scale.max(), 1e-300)
    high = max((abs(total[k]) for k, e in enumerate(EXPONENTS) if e not in QUARTIC), default=0.0) / big
    return PolyCoeffs(coeffs, scales, float(high), denominator, variables)


def p1_coefficients(f: CorrFrame, p: complex = 0.0, q: complex = 0.0) -> PolyCoeffs:
    emb = Embedded(f, P1_SPEC)
    return interpolate(lambda x, y: p1_terms(f, x, y, p, q, emb), "[m^T(C4^1+c2 C124^1)]^3 N0^T(U x V)")


def p2_coefficients(f: CorrFrame, p: complex = 0.0, q: complex = 0.0) -> PolyCoeffs:
    emb = Embedded(f, P1_SPEC)
    return interpolate(
        lambda x, y: p2_terms(f, x, y, p, q, emb), "[m^T(C2^1+c4 C124^1)]^3 N0^T(U x V)", ("c1", "c4")
    )


def _coef_rel(P: PolyCoeffs, e):
    c = P.get(*e)
    s = P.scale(*e)
    return abs(c), s, (abs(c) / s if s > 0 else abs(c))


def _combo_rel(pairs):
    """Relative size of sum k_i * coeff_i, using sum |k_i| * scale_i as the scale."""
    r = abs(sum(k * P.get(*e) for k, P, e in pairs))
    s = sum(abs(k) * P.scale(*e) for k, P, e in pairs)
    return r, s, (r / s if s > 0 else r)


def p1_relation_terms(f: CorrFrame) -> dict:
    """The itemized coefficient relations, as term lists (point values)."""
    v = _val
    Ut, Vt, n = v(f.Ut), v(f.Vt), v(f.n)
    UxN, VxN = f.UxN(), f.VxN()
    y = lambda k, j: v(K.dot(UxN, f.C[k, j]))
    x = lambda k, j: v(K.dot(VxN, f.C[k, j]))
    mc = lambda j: v(f.mC(1, j))
    dmc = lambda j, s: v(f.mC(1, j).diff(s))
    m124, m4, m1, m2, m0 = mc("124"), mc("4"), mc("1"), mc("2"), mc("0")

    def br(j, s):
        # m^T C124 d(m^T Cj) - d(m^T C124) m^T Cj
        return m124 * dmc(j, s) - dmc("124", s) * mc(j)

    out = {}
    out["P1.rel.c1^4"] = [y(2, "4"), Ut * y(1, "4")]
    out["P1.rel.c2^4"] = [x(3, "2"), -Vt * x(1, "2")]
    out["P1.rel.c1^3*c2"] = [x(2, "4"), Ut * x(1, "4"), -0.5 * y(2, "1"), -0.5 * Ut * y(1, "1")]
    out["P1.rel.c1*c2^3"] = [x(3, "1"), -Vt * x(1, "1"), -2 * Ut * x(1, "2"), -2 * x(2, "2")]
    out["P1.rel.c1^2*c2^2"] = [x(3, "4"), -Vt * x(1, "4"), 2 * Ut * x(1, "1"), 2 * x(2, "1"), Ut * y(1, "2"), y(2, "2")]
    k = 1.0 / (2 * m124 * m4)
    out["P1.rel.c1^2*c2"] = [
        -y(2, "2"),
        k * 2 * m124**2 * Ut * y(1, "0"), k * 2 * m124**2 * y(2, "0"),
        -k * 2 * Ut * m124 * m4 * y(1, "2"),
        -k * m1 * m124 * Ut * y(1, "1"), -k * m1 * m124 * y(2, "1"),
        k * 2 * Vt * n * br("4", "u"), -k * 2 * Ut * n * br("4", "v"), -k * 2 * n * br("4", "w"),
    ]
    k2 = -1.0 / (2 * m124 * m4)
    out["P1.rel.c1*c2^2"] = [
        -x(2, "2"),
        -k2 * 2 * m124**2 * Ut * x(1, "0"), -k2 * 2 * m124**2 * x(2, "0"),
        k2 * 2 * Ut * m124 * m4 * x(1, "2"),
        k2 * m1 * m124 * Ut * x(1, "1"), k2 * m1 * m124 * x(2, "1"),
        k2 * Vt * n * br("1", "u"), -k2 * Ut * n * br("1", "v"), -k2 * n * br("1", "w"),
        # the trailing term belongs inside the bracket, paired like its neighbours
        k2 * m124 * m2 * y(2, "1"), k2 * m124 * m2 * Ut * y(1, "1"),
    ]
    k3 = -1.0 / (m124 * m4)
    out["P1.rel.1"] = [
        -x(3, "0"),
        k3 * 2 * m124 * m0 * Ut * x(1, "1"), k3 * 2 * m124 * m0 * x(2, "1"),
        k3 * m124 * m2 * y(2, "0"), -k3 * m124 * m1 * x(2, "0"),
        k3 * Ut * m124 * m2 * y(1, "0"), -k3 * Ut * m124 * m1 * x(1, "0"),
        -k3 * Vt * m124 * m4 * x(1, "0"),
        k3 * Vt * n * br("0", "u"), -k3 * Ut * n * br("0", "v"), -k3 * n * br("0", "w"),
    ]
    out["P1.master.c2^2"] = [
        m124 * (x(2, "1") + Ut * x(1, "1")) * (m1**2 - 4 * m0 * m124 + 4 * m2 * m4),
        2 * Ut * n * m124 * br("0", "v"),
        2 * n * m4 * (dmc("124", "w") * m2 - m124 * dmc("2", "w")),
        2 * n * m2 * (dmc("124", "w") * m4 - m124 * dmc("4", "w")),
        2 * n * m124 * br("0", "w"),
        2 * Vt * n * m4 * br("2", "u"),
        2 * Vt * n * m2 * br("4", "u"),
        -2 * Vt * n * m124 * br("0", "u"),
        -2 * Ut * n * m4 * br("2", "v"),
        -2 * Ut * n * m2 * br("4", "v"),
        -Ut * n * m1 * br("1", "v"),
        -n * m1 * br("1", "w"),
        Vt * n * m1 * br("1", "u"),
    ]
    return out


def p1_claims(f: CorrFrame, P1: PolyCoeffs | None = None, tol: float = 1e-7) -> ResidualReport:
    P1 = P1 or p1_coefficients(f)
    rep = ResidualReport()
    pt = f.point
    # self-check of the interpolant at an off-grid probe
    emb = Embedded(f, P1_SPEC)
    probe = p1_terms(f, 0.3, -0.7, emb=emb)
    direct = sum(probe)
    rep.add("P1.interp", pt, abs(P1(0.3, -0.7) - direct), sum(abs(t) for t in probe),
            abs(P1(0.3, -0.7) - direct) / max(sum(abs(t) for t in probe), 1e-300), 1e-10)
    rep.add("P1.degree", pt, P1.high, 1.0, P1.high, 1e-10)
    # independence of the free derivatives
    alt = sum(p1_terms(f, 0.3, -0.7, p=0.8, q=-1.3, emb=emb))
    rep.add("P1.free_derivs", pt, abs(alt - direct), sum(abs(t) for t in probe),
            abs(alt - direct) / max(sum(abs(t) for t in probe), 1e-300), tol)
    for e in QUARTIC:
        rep.add_triplet(f"P1.{P1.label(*e)}", pt, _coef_rel(P1, e), tol)
    m4, m124 = _val(f.mC(1, "4")), _val(f.mC(1, "124"))
    rep.add_triplet("P1.recur.c2^3", pt, _combo_rel([(2 * m4, P1, (0, 3)), (-m124, P1, (0, 2))]), tol)
    rep.add_triplet("P1.recur.c2", pt, _combo_rel([(2 * m124, P1, (0, 1)), (-m4, P1, (0, 2))]), tol)
    for cid, terms in p1_relation_terms(f).items():
        rep.add_triplet(cid, pt, rel_of(terms), tol)
    return rep


P2_MAPPINGS = [
    # (P2 exponent in (c1, c4), factor kind, P1 exponent in (c1, c2))
    ((4, 0), "1", (0, 4)),
    ((0, 4), "1", (4, 0)),
    ((3, 1), "-1", (1, 3)),
    ((1, 3), "-1", (3, 1)),
    ((2, 2), "1", (2, 2)),
    ((3, 0), "0", None),
    ((1, 2), "1", (1, 2)),
    ((2, 1), "-1", (0, 3)),
    ((0, 3), "0", None),
    ((2, 0), "-m2/m124", (0, 3)),
    ((1, 1), "-m1/m124", (0, 3)),
    ((0, 2), "-m4/m124", (0, 3)),
    ((1, 0), "-m2 m1/m124^2", (0, 3)),
    ((0, 1), "-(m124 m0 + m2 m4)/m124^2", (0, 3)),
    ((0, 0), "-m2 m0/m124^2", (0, 3)),
]


def p2_vs_p1(f: CorrFrame, P1: PolyCoeffs | None = None, P2: PolyCoeffs | None = None, tol: float = 1e-7) -> ResidualReport:
    P1 = P1 or p1_coefficients(f)
    P2 = P2 or p2_coefficients(f)
    mc = lambda j: _val(f.mC(1, j))
    m0, m1, m2, m4, m124 = mc("0"), mc("1"), mc("2"), mc("4"), mc("124")
    factors = {
        "1": 1.0, "-1": -1.0, "0": 0.0,
        "-m2/m124": -m2 / m124,
        "-m1/m124": -m1 / m124,
        "-m4/m124": -m4 / m124,
        "-m2 m1/m124^2": -m2 * m1 / m124**2,
        "-(m124 m0 + m2 m4)/m124^2": -(m124 * m0 + m2 * m4) / m124**2,
        "-m2 m0/m124^2": -m2 * m0 / m124**2,
    }
    rep = ResidualReport()
    for e2, kind, e1 in P2_MAPPINGS:
        cid = f"P2.{P2.label(*e2)}"
        if e1 is None:
            rep.add_triplet(cid, f.point, _coef_rel(P2, e2), tol)
        else:
            rep.add_triplet(cid, f.point, _combo_rel([(1.0, P2, e2), (-factors[kind], P1, e1)]), tol)
    return rep


# -- D / F / G cascade --------------------------------------------------------------------------

def d_eval(f: CorrFrame, c1, c2, spec: JetSpec | None = None):
    """D1..D8 as jets in (u, v, w, c1, c2) around the given c's."""
    spec = spec or c_spec(2, 2)
    emb = Embedded(f, spec)
    C1 = J.seed_variable(spec, "c1", c1)
    C2 = J.seed_variable(spec, "c2", c2)
    num = emb.mC("0") + emb.mC("1") * C1 + emb.mC("2") * C2 + emb.mC("124") * (C1 * C1)
    den = emb.mC("4") + emb.mC("124") * C2
    if abs(den.value) < DENOM_THRESHOLD:
        raise C4PoleError(den.value)
    c4 = -num / den
    EU, EV = emb.EUV(C1, C2, c4)
    Ut, Vt = emb.Ut, emb.Vt
    c4_1, c4_2 = c4.diff("c1"), c4.diff("c2")
    D = {}
    D[1] = -EU[1]
    D[2] = c4_1 * D[1] + c4.diff("u") + EV[1]
    D[3] = c4_2
    D[4] = -c4_1
    D[5] = D[1] * Vt - Ut * (D[2] - EV[1]) + EV[2]
    D[6] = -(Ut * D[3])
    D[7] = -Vt - Ut * D[4]
    D[8] = D[1] * Ut - EU[2]
    return D, emb, c4


def _dd(D, i, var):
    return D[i].diff(var)


def compatibility_relations(D, emb, p, q, r, s, t):
    """The three second-order compatibility relations at the expansion point.

    ``p, q`` are d_u c2, d_v c2 and ``r, s, t`` the second derivatives
    d_uu c2, d_uv c2, d_vv c2.  Returns three lists of additive terms.
    """
    v = lambda x: x.value
    d = {(i, var): v(D[i].diff(var)) for i in D for var in ("u", "v", "w", "c1", "c2")}
    Dv = {i: v(D[i]) for i in D}
    Ut, Vt = v(emb.Ut), v(emb.Vt)
    Ut_u, Ut_v = v(emb.Ut.diff("u")), v(emb.Ut.diff("v"))
    Vt_u, Vt_v = v(emb.Vt.diff("u")), v(emb.Vt.diff("v"))
    dD = lambda i, var: d[i, var]
    c1v = Dv[2] + p * Dv[3] + q * Dv[4]
    c1u = -q + Dv[1]
    c1w = Dv[5] + p * Dv[6] + q * Dv[7]
    c2w = Dv[8] + p * Vt - q * Ut
    g1 = [
        -t, dD(1, "c1") * c1v, dD(1, "c2") * q, dD(1, "v"),
        -(dD(2, "c1") + p * dD(3, "c1") + q * dD(4, "c1")) * c1u,
        -(dD(2, "c2") + p * dD(3, "c2") + q * dD(4, "c2")) * p,
        -(dD(2, "u") + p * dD(3, "u") + q * dD(4, "u")),
        -(r * Dv[3] + s * Dv[4]),
    ]
    g2 = [
        -(dD(8, "c1") * c1v), -(dD(8, "c2") * q), -dD(8, "v"), -s * Vt, -p * Vt_v, t * Ut, q * Ut_v,
        dD(1, "c1") * c1w, dD(1, "c2") * c2w, dD(1, "w"),
        -(dD(5, "c1") + p * dD(6, "c1") + q * dD(7, "c1")) * c1u,
        -(dD(5, "c2") + p * dD(6, "c2") + q * dD(7, "c2")) * p,
        -(dD(5, "u") + p * dD(6, "u") + q * dD(7, "u")),
        -(r * Dv[6] + s * Dv[7]),
    ]
    g3 = [
        (dD(2, "c1") + p * dD(3, "c1") + q * dD(4, "c1")) * c1w,
        (dD(2, "c2") + p * dD(3, "c2") + q * dD(4, "c2")) * c2w,
        dD(2, "w"), p * dD(3, "w"), q * dD(4, "w"),
        Dv[3] * (dD(8, "c1") * c1u + dD(8, "c2") * p + dD(8, "u") + r * Vt + p * Vt_u - s * Ut - q * Ut_u),
        Dv[4] * (dD(8, "c1") * c1v + dD(8, "c2") * q + dD(8, "v") + s * Vt + p * Vt_v - t * Ut - q * Ut_v),
        -(dD(5, "c1") + p * dD(6, "c1") + q * dD(7, "c1")) * c1v,
        -(dD(5, "c2") + p * dD(6, "c2") + q * dD(7, "c2")) * q,
        -(dD(5, "v") + p * dD(6, "v") + q * dD(7, "v")),
        -(s * Dv[6] + t * Dv[7]),
    ]
    return g1, g2, g3


def f_matrix(D, emb, p, q):
    """The linear system A (r, s, t) = -g0 read off the compatibility relations."""
    g = lambda r, s, t: np.array([sum(x) for x in compatibility_relations(D, emb, p, q, r, s, t)])
    g0 = g(0.0, 0.0, 0.0)
    A = np.stack([g(1.0, 0.0, 0.0) - g0, g(0.0, 1.0, 0.0) - g0, g(0.0, 0.0, 1.0) - g0], axis=1)
    return A, g0


def f_solve(f: CorrFrame, c1, c2, p, q, rtol: float = 1e-9, D=None):
    """Solve for (d_uu c2, d_uv c2, d_vv c2); raises :class:`FSystemSingular`."""
    if D is None:
        D, emb, _ = d_eval(f, c1, c2)
    else:
        D, emb = D
    A, g0 = f_matrix(D, emb, p, q)
    det = complex(np.linalg.det(A))
    bound = float(np.prod(np.linalg.norm(A, axis=1)))
    if abs(det) <= rtol * bound:
        raise FSystemSingular(det, bound)
    return np.linalg.solve(A, -g0)


def g_eval(f: CorrFrame, c1, c2, p, q):
    """G1, G2 from the two remaining compatibility conditions.

    They need the second derivatives of c2 from :func:`f_solve`; when that
    system is singular the error propagates.
    """
    D, emb, _ = d_eval(f, c1, c2)
    r, s, t = f_solve(f, c1, c2, p, q, D=(D, emb))
    g = compatibility_relations(D, emb, p, q, r, s, t)
    return complex(sum(g[1])), complex(sum(g[2]))


def r3_residual(f: CorrFrame, c1, c2, p, q):
    """(|G2 + (Vt/Ut) G1|, scale, rel)."""
    G1, G2 = g_eval(f, c1, c2, p, q)
    k = _val(f.Vt) / _val(f.Ut)
    return rel_of([G2, k * G1])


def displayed_matrix(D, emb):
    """The 3x3 matrix as displayed next to the determinant claim."""
    v = lambda i: D[i].value
    Ut, Vt = emb.Ut.value, emb.Vt.value
    return np.array([
        [-v(3), -v(4), -1.0],
        [-v(6), -v(7) + Vt, -Ut],
        [Vt, -v(6) + Vt - Ut, -v(7) - Ut],
    ])


def determinant_leading(f: CorrFrame, c2: complex = 0.2, which: str = "displayed", degree: int = 8):
    """c1^4 coefficient of [m^T(C4 + c2 C124)]^4 det, by interpolation in c1.

    ``which`` is ``"displayed"`` for the displayed matrix or ``"derived"`` for the
    matrix read off the compatibility relations.  Returns the coefficient
    list (lowest degree first) and the claimed leading value.
    """
    nodes = np.arange(degree + 1, dtype=float) - degree / 2
    vals = []
    for c1 in nodes:
        D, emb, _ = d_eval(f, c1, c2)
        den = (emb.mC("4") + emb.mC("124") * c2).value
        if which == "displayed":
            A = displayed_matrix(D, emb)
        else:
            A, _ = f_matrix(D, emb, 0.3, -0.4)
        vals.append(np.linalg.det(A) * den**4)
    coeffs = np.linalg.solve(np.vander(nodes, increasing=True), np.array(vals))
    claim = 2 * f.mC(1, "124").value ** 4 * f.Ut.value**2
    return coeffs, complex(claim)


# -- A/B/C decompositions ----------------------------------------------------------------

ABC_IDS = ("R1-2", "R1-5", "R1-7", "R1-8", "R1-9", "R2-1", "R2-2", "R2-3")


@dataclass
class ABC:
    """Additive terms of A (vector), B (vector) and C (scalar)."""

    A_terms: list
    B_terms: list
    C_terms: list
    zero: str | None  # "A" or "B" when the display asserts that member vanishes

    @property
    def A(self) -> Jet:
        return sum(self.A_terms[1:], self.A_terms[0])

    @property
    def B(self) -> Jet:
        return sum(self.B_terms[1:], self.B_terms[0])

    @property
    def C(self) -> Jet:
        return sum(self.C_terms[1:], self.C_terms[0])


def _abc_parts(f: CorrFrame):
    sj = f.cj.sj
    N0, V, Vw, U, Vs, mb = f.N0, f.V, f.Vw, f.U, f.Vs, f.mb
    n = f.n
    return dict(
        sj=sj, N0=N0, V=V, Vw=Vw, U=U, Vs=Vs, mb=mb, n=n,
        tU=_tan(N0, U), tV=_tan(N0, Vs),
        NxV=K.cross(N0, V),
        wU=K.triple(N0, Vw, U), wV=K.triple(N0, Vw, Vs),
        sU=K.triple(N0, V, U), sV=K.triple(N0, V, Vs),
        VV=K.dot(V, V), m2=mb * mb,
        VU=K.dot(V, U), VVs=K.dot(V, Vs),
        UxN=K.cross(U, N0), VxN=K.cross(Vs, N0), VwxN=K.cross(Vw, N0),
        reg=K.triple(N0, Vw, V),
        KK=sj.K * K.triple(N0, sj.xu, sj.xv) / n,
        Ut=f.Ut, Vt=f.Vt,
    )


def abc_decompose(f: CorrFrame, relation_id: str) -> ABC:
    """A, B, C of the displayed decomposition d_uN0^T A + d_vN0^T B + C."""
    if relation_id not in ABC_IDS:
        raise ContactRollError(f"unknown relation id {relation_id!r}; expected one of {', '.join(ABC_IDS)}")
    g = _abc_parts(f)
    N0, V, Vw, U, Vs, n = g["N0"], g["V"], g["Vw"], g["U"], g["Vs"], g["n"]
    tU, tV, NxV = g["tU"], g["tV"], g["NxV"]
    wU, wV, sU, sV = g["wU"], g["wV"], g["sU"], g["sV"]
    VV, m2, VU, VVs = g["VV"], g["m2"], g["VU"], g["VVs"]
    UxN, VxN, VwxN, reg, KK = g["UxN"], g["VxN"], g["VwxN"], g["reg"], g["KK"]
    Ut, Vt = g["Ut"], g["Vt"]
    sj = g["sj"]
    xu, xv = sj.xu, sj.xv
    Vu, Vv = V.diff("u"), V.diff("v")
    rm2 = J.reciprocal(m2)
    dot, tri = K.dot, K.triple
    UN2, VN2, UNVN = dot(UxN, UxN), dot(VxN, VxN), dot(VxN, UxN)
    wdU, wdV = dot(Vw, U), dot(Vw, Vs)
    n2 = n * n
    Tu = lambda X: _tan(N0, X)
    dtan = lambda X, s: _tan(N0, X).diff(s)
    # shared by the first two relations
    cross_terms = lambda s_: [
        -(tri(N0, Vw, xv) * tri(N0, Vw, Vu)) / (n * reg) * s_,
        tri(N0, Vw, xu) * tri(N0, Vw, Vv) / (n * reg) * s_,
    ]

    if relation_id == "R1-5":
        A = [
            -(NxV * (wV * n * sU)),
            -(tU * (wV * (n * m2 + VU * sV))),
            tV * ((VV + m2) * wU * n + VU * wV * sU),
            Vw * ((m2 + VV) * n2),
        ]
        B = [NxV * (n * wU * sU), tU * (VVs * wU * sU), -(tV * (VU * wU * sU))]
        C_ = cross_terms(sU) + [
            -(wV / n * tri(N0, xu, Vu)), wU / n * tri(N0, U, Vv),
            -(rm2 * m2 * wU), -(rm2 * dot(Vw, V) * sU), -(KK * m2 * wU), -(KK * dot(Vw, V) * sU),
            -(VU * reg * KK), rm2 * sU * dot(Vw, V),
        ]
        return ABC(A, B, C_, "B")
    if relation_id == "R1-2":
        A = [-(NxV * (n * wV * sV)), -(tU * (VVs * wV * sV)), tV * (VU * wV * sV)]
        B = [
            NxV * (sV * wU * n),
            tV * ((m2 * n - VVs * sU) * wU),
            tU * (-(VV + m2) * wV * n + VVs * wU * sV),
            Vw * ((m2 + VV) * n2),
        ]
        C_ = cross_terms(sV) + [
            -(wV / n * tri(N0, Vs, Vu)), wU / n * tri(N0, xv, Vv),
            -(rm2 * m2 * wV), -(rm2 * dot(Vw, V) * sV), -(KK * m2 * wV), -(KK * dot(Vw, V) * sV),
            -(KK * VVs * reg), rm2 * dot(Vw, V) * sV,
        ]
        return ABC(A, B, C_, "A")
    if relation_id == "R1-7":
        A = [
            VwxN * (n2 * sV),
            -(tU * ((wdV * n + UNVN * wV + VN2 * wU) * sV)),
            Vw * (n2 * dot(Vs, V)),
            VxN * ((sU * wV + sV * wU) * n),
            tV * (wdV * n * sU + UNVN * wU * sV + UN2 * wV * sV),
        ]
        B = [
            VwxN * (n2 * sU),
            Vw * (n2 * dot(U, V)),
            -(UxN * ((wV * sU + wU * sV) * n)),
            tV * ((n * wdU - UN2 * wV - UNVN * wU) * sU),
            tU * (-(wdU * n * sV) + VN2 * sU * wU + UNVN * sU * wV),
        ]
        C_ = [
            dot(VwxN, dtan(Vs, "u")), dot(VwxN, dtan(U, "v")),
            dot(VxN, (tU * Vt).diff("u")), Ut * dot(VxN, dtan(Vs, "u")), -dot(VxN, Tu(U.diff("w"))),
            -dot(UxN, Tu(Vs.diff("w"))), -(Vt * dot(UxN, dtan(U, "v"))), -dot(UxN, (tV * Ut).diff("v")),
            -(rm2 * dot(Vw, U * sV + Vs * sU)), -(KK * dot(Vw, U * sV + Vs * sU)),
            KK * wdU * dot(Vs, NxV), KK * wdV * dot(U, NxV), -(KK * UNVN * n * reg),
            KK * VN2 * dot(U, NxV) * Ut, -(KK * UN2 * dot(Vs, NxV) * Vt),
            -(UNVN * reg * rm2), -(VN2 * Ut * sU * rm2), UN2 * Vt * sV * rm2,
        ]
        return ABC(A, B, C_, None)
    if relation_id == "R1-8":
        A = [VxN * (n * wV * sV), -(tU * (VN2 * wV * sV)), tV * (UNVN * wV * sV)]
        B = [
            VwxN * (n2 * sV),
            -(UxN * (n * wV * sV)),
            tU * (-(wdV * sV * n) + VN2 * wV * sU),
            tV * ((wdV * n - UNVN * wV) * sU),
            Vw * (VVs * n2),
        ]
        C_ = [
            dot(VwxN, dtan(Vs, "v")),
            Vt * dot(VxN, dtan(Vs, "u")), -dot(VxN, Tu(Vs.diff("w"))),
            -dot(UxN, (tV * Vt).diff("v")),
            -(KK * wV * VVs),
        ]
        return ABC(A, B, C_, "A")
    if relation_id == "R1-9":
        A = [
            -(VwxN * (n2 * sU)),
            -(VxN * (n * wU * sU)),
            -(tV * (wdU * sU * n + UN2 * wU * sV)),
            tU * ((wdU * n + UNVN * wU) * sV),
            -(Vw * (VU * n2)),
        ]
        B = [UxN * (n * wU * sU), tV * (UN2 * wU * sU), -(tU * (UNVN * wU * sU))]
        C_ = [
            -dot(VwxN, dtan(U, "u")),
            -dot(VxN, (tU * Ut).diff("u")),
            dot(UxN, Tu(U.diff("w"))),
            Ut * dot(UxN, dtan(U, "v")),
            KK * wU * VU,
        ]
        return ABC(A, B, C_, "B")
    if relation_id == "R2-1":
        A = [
            UxN * (0.5 * sU * wV * n),
            tV * (0.5 * UN2 * sU * wV + 0.5 * wU * VU * n),
            -(tU * (0.5 * UN2 * sV * wV)),
            Vw * (0.5 * VU * n2),
        ]
        B = [-(UxN * (0.5 * n * sU * wU)), tU * (0.5 * UNVN * sU * wU), -(tV * (0.5 * UN2 * sU * wU))]
        C_ = [
            0.5 * Ut.diff("u") * n,
            0.5 * Vt * dot(UxN, dtan(U, "u")),
            -(0.5 * dot(UxN, U.diff("w"))),
            -(0.5 * Ut * dot(UxN, dtan(U, "v"))),
            -(0.5 * KK * wU * VU),
        ]
        return ABC(A, B, C_, "B")
    if relation_id == "R2-2":
        A = [VxN * (n * sV * wV), tV * (UNVN * sV * wV), -(tU * (VN2 * sV * wV))]
        B = [
            -(VxN * ((wV * sU + 2.0 * wU * sV) * n)),
            tU * (-(sV * n * wdV) + VN2 * wV * sU),
            -(tV * (VN2 * wU * sU)),
            Vw * (VVs * n2),
        ]
        C_ = [
            -dot(VxN, Tu(Vs.diff("w"))), dot(VxN, (tU * Vt).diff("w")), Ut * dot(VxN, Tu(Vs.diff("w"))),
            -(Vt * dot(VxN, dtan(U, "v"))), -(2.0 * Ut * dot(VxN, dtan(Vs, "v"))), Vt * dot(VxN, dtan(Vs, "u")),
            -(KK * wV * VVs),
        ]
        return ABC(A, B, C_, "A")
    # R2-3
    A = [
        -(VxN * (n * wV * sU)), -(UxN * (n * wV * sV)),
        tU * (2.0 * wV * sV * UNVN),
        -(tV * (sU * n * wdV + wU * sV * UNVN + wV * sV * UN2)),
        -(Vw * (VVs * n2)),
    ]
    B = [
        UxN * (wU * n * sV), VxN * (wU * n * sU),
        tU * (sV * n * wdU - wV * sU * UNVN - wU * sU * VN2),
        tV * (2.0 * wU * sU * UNVN),
        -(Vw * (n2 * VU)),
    ]
    C_ = [
        dot(VxN, Tu(U.diff("w"))), -(Ut.diff("v") * dot(VxN, tU)), Ut * dot(VxN, dtan(U, "v")),
        -(Vt * dot(VxN, dtan(U, "u"))), -(2.0 * Vt.diff("u") * dot(VxN, tU)),
        Ut * dot(UxN, dtan(Vs, "v")), -dot(UxN, (tV * Vt).diff("u")), dot(UxN, Tu(Vs.diff("w"))),
        KK * reg * UNVN, -(KK * VN2 * Ut * sU), KK * UN2 * Vt * sV,
    ]
    return ABC(A, B, C_, None)


def _vec_terms_rel(terms):
    vals = [np.asarray(t.value) for t in terms]
    r = float(np.linalg.norm(sum(vals)))
    s = float(sum(np.linalg.norm(v) for v in vals))
    return r, s, (r / s if s > 0 else r)


def abc_recombine(f: CorrFrame, abc: ABC) -> list:
    """Additive terms of d_uN0^T A + d_vN0^T B + C."""
    sj = f.cj.sj
    return [K.dot(sj.Nu, a) for a in abc.A_terms] + [K.dot(sj.Nv, b) for b in abc.B_terms] + list(abc.C_terms)


def abc_split(f: CorrFrame, abc: ABC) -> dict:
    """The split relations (g^{1j} x_j^T A, g^{2j} x_j^T B, mixed, C) as term lists."""
    sj = f.cj.sj
    (g11, g12), (g21, g22) = sj.metric_inverse()
    xu, xv = sj.xu, sj.xv
    Au = [K.dot(xu, a) for a in abc.A_terms]
    Av = [K.dot(xv, a) for a in abc.A_terms]
    Bu = [K.dot(xu, b) for b in abc.B_terms]
    Bv = [K.dot(xv, b) for b in abc.B_terms]
    return {
        "A": [g11 * t for t in Au] + [g12 * t for t in Av],
        "B": [g21 * t for t in Bu] + [g22 * t for t in Bv],
        "AB": [g21 * t for t in Au] + [g22 * t for t in Av] + [g11 * t for t in Bu] + [g12 * t for t in Bv],
        "C": list(abc.C_terms),
    }


#: the R1/R2 value each decomposition rewrites
ABC_TARGETS = {
    "R1-2": "R1.2", "R1-5": "R1.5", "R1-7": "R1.7", "R1-8": "R1.8", "R1-9": "R1.9",
    "R2-1": "P1.rel.c1^3*c2", "R2-2": "P1.rel.c1*c2^3", "R2-3": "P1.rel.c1^2*c2^2",
}


def abc_target_terms(f: CorrFrame, relation_id: str) -> list:
    key = ABC_TARGETS[relation_id]
    if key.startswith("R1."):
        return r1_terms(f)[int(key[3:]) - 1]
    return p1_relation_terms(f)[key]


def abc_checks(f: CorrFrame, ids=ABC_IDS, valid: bool = True, tol: float = 1e-7, zero_tol: float = 1e-10) -> ResidualReport:
    """Zero claims always; recombination and split relations when ``valid`` (Bäcklund data)."""
    rep = ResidualReport()
    for rid in ids:
        abc = abc_decompose(f, rid)
        if abc.zero:
            terms = abc.A_terms if abc.zero == "A" else abc.B_terms
            rep.add_triplet(f"abc.{rid}.{abc.zero}=0", f.point, _vec_terms_rel(terms), zero_tol)
        if not valid:
            continue
        rec = abc_recombine(f, abc)
        target = abc_target_terms(f, rid)
        rep.add_triplet(f"abc.{rid}.recombine", f.point, rel_of(rec + [-t for t in target]), tol)
        for name, terms in abc_split(f, abc).items():
            rep.add_triplet(f"abc.{rid}.split.{name}", f.point, rel_of(terms), tol)
    return rep
