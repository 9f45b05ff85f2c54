"""Contact-element distributions along a seed surface.

A :class:`ContactField` gives the offset ``V(u, v, w)`` of the centre of each
contact element from the seed point, tangent to the seed, and the normal
component ``mb`` of the element normal ``m = V x N0 + mb N0``.  All residuals
are evaluated pointwise on jets in ``(u, v, w)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import forms
from . import jets as J
from . import kernel as K
from .errors import (
    ContactRollError,
    DevelopableSeedError,
    RegularityError,
    ZeroMError,
)
from .forms import Form1, Form2
from .jets import Jet, JetSpec
from .report import ResidualReport
from .surface import ParametricSurface, SurfaceJet, surface_jet

#: thresholds for the excluded loci
K_THRESHOLD = 1e-10
M_THRESHOLD = 1e-12
REGULARITY_THRESHOLD = 1e-12

UV = ("u", "v")


@dataclass(frozen=True)
class ContactField:
    """``V_rule(sj, W)`` returns the Cx3 jet V from the seed jet and the fibre jet W.

    ``m_rule(sj, W)`` returns the scalar jet of ``mb``; when it is ``None``
    ``mb`` is derived from the first integrability condition with the branch
    ``m_sign``.
    """

    name: str
    seed: ParametricSurface
    V_rule: Callable
    m_rule: Callable | None = None
    m_sign: complex = 1.0


def uvw_spec(order: int) -> JetSpec:
    return JetSpec.total(("u", "v", "w"), order)


def _uv_ratio(num: Form2, den: Form2):
    return num[UV] / den[UV]


@dataclass
class ContactJet:
    point: tuple
    spec: JetSpec
    sj: SurfaceJet
    V: Jet
    mb: Jet
    m: Jet

    # -- derived pieces -----------------------------------------------------
    @property
    def N0(self) -> Jet:
        return self.sj.N

    @property
    def Vw(self) -> Jet:
        return self.V.diff("w")

    @property
    def U(self) -> Jet:
        """Script U = d_u(V + x0)."""
        return self.V.diff("u") + self.sj.xu

    @property
    def Vv(self) -> Jet:
        """Script V = d_v(V + x0)."""
        return self.V.diff("v") + self.sj.xv

    def dY(self) -> Form1:
        """d(V + x0) on (u, v)."""
        return Form1({"u": self.U, "v": self.Vv}, "uv")

    def dV(self) -> Form1:
        return Form1({"u": self.V.diff("u"), "v": self.V.diff("v")}, "uv")

    def dx0(self) -> Form1:
        return self.sj.dx()

    def dN0(self) -> Form1:
        return self.sj.dN()

    def reg(self) -> Jet:
        """N0^T(d_wV x V), the regularity denominator."""
        r = K.triple(self.N0, self.Vw, self.V)
        if abs(r.value) < REGULARITY_THRESHOLD:
            raise RegularityError(f"N0^T(d_wV x V) = {r.value!r}")
        return r


def _w_of_first_line(sj: SurfaceJet, V: Jet):
    """The ratio term of the first integrability condition (a 0-form jet)."""
    Vw = V.diff("w")
    dY = Form1({"u": V.diff("u") + sj.xu, "v": V.diff("v") + sj.xv}, "uv")
    dx0 = sj.dx()
    num = forms.wedge(dY.map(lambda c: K.cross(Vw, c)), dx0.map(lambda c: K.cross(V, c)), "dot") * 2.0
    den = forms.pair_form2(forms.cross_wedge(dx0, dx0), K.cross(Vw, V))
    return _uv_ratio(num, den)


def m_squared_from_first_integrability(sj: SurfaceJet, V: Jet) -> Jet:
    if abs(sj.K.value) < K_THRESHOLD:
        raise DevelopableSeedError(sj.K.value)
    T = _w_of_first_line(sj, V)
    return -T / sj.K - K.dot(V, V)


def m_from_first_integrability(sj: SurfaceJet, V: Jet):
    """The two square roots ``(+mb, -mb)`` solving the first integrability condition."""
    m2 = m_squared_from_first_integrability(sj, V)
    if abs(m2.value) < M_THRESHOLD:
        raise ZeroMError(m2.value)
    r = J.sqrt(m2)
    return r, -r


def contact_jet(
    field: ContactField,
    u: float,
    v: float,
    w: float,
    order: int = 3,
    spec: JetSpec | None = None,
    normal_sign: complex = 1.0,
    m_sign: complex | None = None,
    perturb=None,
) -> ContactJet:
    """Evaluate the field at ``(u, v, w)`` with jets of the given order.

    ``perturb(sj, W)`` may return a Cx3 jet added to V (negative controls).
    """
    spec = spec or uvw_spec(order)
    sj = surface_jet(field.seed, u, v, spec=spec, normal_sign=normal_sign)
    W = J.seed_variable(spec, "w", w)
    V = field.V_rule(sj, W)
    if perturb is not None:
        V = V + perturb(sj, W)
    if field.m_rule is not None:
        mb = field.m_rule(sj, W)
        if not isinstance(mb, Jet):
            mb = Jet.constant(spec, mb)
    else:
        roots = m_from_first_integrability(sj, V)
        sign = field.m_sign if m_sign is None else m_sign
        mb = roots[0] * sign
    if abs(mb.value) < M_THRESHOLD:
        raise ZeroMError(mb.value**2)
    m = K.cross(V, sj.N) + mb * sj.N
    return ContactJet((u, v, w), spec, sj, V, mb, m)


# -- leaf equation -------------------------------------------------------------

def _zero_omega(cj: ContactJet) -> Form1:
    z = Jet.zeros(cj.spec, (3,))
    return Form1({"u": z, "v": z}, "uv")


def dw_form(cj: ContactJet, omega: Form1 | None = None) -> Form1:
    """The leaf 1-form ``dw`` on (u, v) for the rolling with connection ``omega``."""
    omega = omega or _zero_omega(cj)
    den = cj.reg()
    N0, V = cj.N0, cj.V
    first = cj.dY().map(lambda c: K.triple(N0, V, c))
    second = Form1(
        {d: K.dot(V, K.cross(omega[d], N0) + cj.dN0()[d]) for d in UV}, "uv"
    )
    return (first + second * cj.mb) / den


def leaf_condition_residual(cj: ContactJet, omega: Form1 | None, dw: Form1):
    """``m^T(omega x V + d(V+x0) + d_wV dw)`` as (abs, scale, rel) and the 1-form."""
    omega = omega or _zero_omega(cj)
    m = cj.m
    t1 = omega.map(lambda c: K.dot(m, K.cross(c, cj.V)))
    t2 = cj.dY().map(lambda c: K.dot(m, c))
    t3 = dw * K.dot(m, cj.Vw)
    return forms.residual([t1, t2, t3]), t1 + t2 + t3


# -- integrability -------------------------------------------------------------

def _A_form(cj: ContactJet, den) -> Form1:
    """N0^T[V x d(V+x0)] / N0^T(d_wV x V)."""
    return cj.dY().map(lambda c: K.triple(cj.N0, cj.V, c)) / den


def _B_form(cj: ContactJet, den) -> Form1:
    """N0^T(d_wV x dV) / N0^T(d_wV x V)."""
    return cj.dV().map(lambda c: K.triple(cj.N0, cj.Vw, c)) / den


def integrability_terms(cj: ContactJet) -> dict:
    """Additive terms of every integrability display, keyed by check id."""
    sj = cj.sj
    V, Vw, N0, mb = cj.V, cj.Vw, cj.N0, cj.mb
    Kc = sj.K
    den = cj.reg()
    dx0 = cj.dx0()
    dY = cj.dY()
    dV = cj.dV()
    big_den = forms.pair_form2(forms.cross_wedge(dx0, dx0), K.cross(Vw, V))[UV]

    T = (forms.wedge(dY.map(lambda c: K.cross(Vw, c)), dx0.map(lambda c: K.cross(V, c)), "dot") * 2.0)[UV] / big_den
    line1 = [T, mb * mb * Kc, K.dot(V, V) * Kc]

    A = _A_form(cj, den)
    B = _B_form(cj, den)
    mw = mb.diff("w")
    dmb = Form1({d: mb.diff(d) for d in UV}, "uv")
    line2 = [dmb, A * mw, -(B * mb)]

    T5 = (forms.wedge(dV.map(lambda c: K.cross(Vw, c)), dx0.map(lambda c: K.cross(Vw, c)), "dot") * 2.0)[UV] / big_den
    paw = [T5, mb * mw * Kc, K.dot(V, Vw) * Kc]

    # first display of the reduced system
    Aw = dY.map(lambda c: K.triple(N0, Vw, c) / den)
    Aw_w = Aw.map(lambda c: c.diff("w"))
    nVdx = dx0.map(lambda c: K.triple(N0, V, c))
    nVwdx = dx0.map(lambda c: K.triple(N0, Vw, c))
    i1 = [forms.wedge(Aw_w, nVdx)[UV], -forms.wedge(B, nVwdx)[UV]]

    # second display: (1/2) d S = -X A + S B
    S = T / Kc + K.dot(V, V)
    X = T5 / Kc + K.dot(V, Vw)
    dS = Form1({d: S.diff(d) * 0.5 for d in UV}, "uv")
    i2 = [dS, A * X, -(B * S)]
    return {
        "eq4.line1": line1,
        "eq4.line2": line2,
        "eq5.pawV": paw,
        "eq6.first": i1,
        "eq6.second": i2,
    }


def consistency_terms(cj: ContactJet) -> list:
    """Additive terms of the consistency condition, as dicts over (uu, uv, vv)."""
    N0, m = cj.N0, cj.m
    mN = K.dot(m, N0)
    P = (N0[:, None] * m[None, :]) / mN
    Qm = K.identity(P) - K.transpose(P)
    Y = {"u": cj.U, "v": cj.Vv}
    two_form = 2.0 * K.triple(N0, cj.U, cj.Vv)
    if abs(two_form.value) < REGULARITY_THRESHOLD:
        raise RegularityError("N0^T[d(V+x0) x^ d(V+x0)] vanishes")
    Pu, Pv, Pw = P.diff("u"), P.diff("v"), P.diff("w")
    Z = (K.matvec(Pu, Y["v"]) - K.matvec(Pv, Y["u"])) / two_form
    dP = {"u": Pu, "v": Pv}
    row = {d: K.matvec(K.transpose(Qm), Y[d]) for d in UV}
    b1 = {d: K.matvec(dP[d], cj.Vw) for d in UV}
    b2 = {d: -K.matvec(Pw, Y[d]) for d in UV}
    b3 = {d: 2.0 * K.triple(N0, cj.Vw, Y[d]) * Z for d in UV}
    terms = []
    for b in (b1, b2, b3):
        f1 = Form1(row, "uv")
        f2 = Form1(b, "uv")
        terms.append(forms.sym_product(f1, f2, "dot"))
    return terms


def integrability_residuals(cj: ContactJet) -> ResidualReport:
    rep = ResidualReport()
    for cid, terms in integrability_terms(cj).items():
        rep.add_triplet(cid, cj.point, forms.residual(terms), 1e-8)
    return rep


def consistency_residual(cj: ContactJet):
    return forms.residual(consistency_terms(cj))


# -- leaf integration ------------------------------------------------------------

@dataclass
class LeafMesh:
    us: np.ndarray
    vs: np.ndarray
    w: np.ndarray
    points: np.ndarray
    w_alt: np.ndarray
    path_gap: float
    error: str | None = None

    def rows(self):
        for i, u in enumerate(self.us):
            for j, v in enumerate(self.vs):
                p = self.points[i, j]
                yield (u, v, self.w[i, j].real, p[0].real, p[0].imag, p[1].real, p[1].imag, p[2].real, p[2].imag)


def _slope(field, u, v, w, spec, omega_fn, m_sign):
    cj = contact_jet(field, u, v, w, spec=spec, m_sign=m_sign)
    om = omega_fn(u, v) if omega_fn else None
    f = dw_form(cj, om)
    return complex(f["u"].value), complex(f["v"].value), cj


def _rk4(f, y, t0, h):
    k1 = f(t0, y)
    k2 = f(t0 + h / 2, y + h / 2 * k1)
    k3 = f(t0 + h / 2, y + h / 2 * k2)
    k4 = f(t0 + h, y + h * k3)
    return y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)


def leaf_integrate(
    field: ContactField,
    w0: float,
    us: np.ndarray,
    vs: np.ndarray,
    omega_fn=None,
    substeps: int = 1,
    m_sign: complex | None = None,
    point_fn=None,
) -> LeafMesh:
    """Integrate the leaf equation over a rectangular grid from ``(us[0], vs[0])``.

    ``w`` is obtained twice, along the first row then up the columns and along
    the first column then across the rows; ``path_gap`` is the largest
    difference.  The fibre coordinate is real along real grids only for real
    fields, so ``w`` is carried as a complex number.
    ``point_fn(cj)`` maps a contact jet to a leaf point (default ``x0 + V``).
    """
    spec = uvw_spec(2)
    us = np.asarray(us, dtype=float)
    vs = np.asarray(vs, dtype=float)

    def du(u, y, v):
        return _slope(field, u, v, y, spec, omega_fn, m_sign)[0]

    def dv(v, y, u):
        return _slope(field, u, v, y, spec, omega_fn, m_sign)[1]

    def march(f, ts, y0, fixed):
        out = [y0]
        y = y0
        for a, b in zip(ts[:-1], ts[1:]):
            h = (b - a) / substeps
            t = a
            for _ in range(substeps):
                y = _rk4(lambda tt, yy: f(tt, yy, fixed), y, t, h)
                t += h
            out.append(y)
        return np.array(out)

    nu, nv = len(us), len(vs)
    w_a = np.full((nu, nv), np.nan + 0j)
    w_b = np.full((nu, nv), np.nan + 0j)
    error = None
    try:
        row0 = march(du, us, complex(w0), vs[0])
        for i in range(nu):
            w_a[i, :] = march(dv, vs, row0[i], us[i])
        col0 = march(dv, vs, complex(w0), us[0])
        for j in range(nv):
            w_b[:, j] = march(du, us, col0[j], vs[j])
    except ContactRollError as exc:
        error = str(exc)
    points = np.full((nu, nv, 3), np.nan + 0j)
    if error is None:
        for i in range(nu):
            for j in range(nv):
                cj = contact_jet(field, us[i], vs[j], w_a[i, j], order=1, m_sign=m_sign)
                if point_fn is None:
                    points[i, j] = cj.sj.x.value + cj.V.value
                else:
                    points[i, j] = point_fn(cj)
    gap = float(np.nanmax(np.abs(w_a - w_b))) if error is None else float("nan")
    return LeafMesh(us, vs, w_a, points, w_b, gap, error)


_D1 = np.array([1, -8, 0, 8, -1]) / 12.0
_D2 = np.array([-1, 16, -30, 16, -1]) / 12.0


def mesh_curvature(mesh: LeafMesh) -> np.ndarray:
    """Gaussian curvature of the leaf mesh by fourth-order central differences.

    Entries within two nodes of the boundary are NaN.
    """
    X = mesh.points
    hu = mesh.us[1] - mesh.us[0]
    hv = mesh.vs[1] - mesh.vs[0]
    nu, nv = X.shape[:2]
    Kout = np.full((nu, nv), np.nan + 0j)
    off = np.arange(-2, 3)
    for i in range(2, nu - 2):
        for j in range(2, nv - 2):
            colu = X[i + off, j]
            colv = X[i, j + off]
            xu = _D1 @ colu / hu
            xv = _D1 @ colv / hv
            xuu = _D2 @ colu / hu**2
            xvv = _D2 @ colv / hv**2
            block = X[np.ix_(i + off, j + off)]
            xuv = np.einsum("a,b,abk->k", _D1, _D1, block) / (hu * hv)
            n = np.cross(xu, xv)
            nn = np.sqrt(np.sum(n * n))
            N = n / nn
            E, F, G = xu @ xu, xu @ xv, xv @ xv
            L, M, Nn = xuu @ N, xuv @ N, xvv @ N
            Kout[i, j] = (L * Nn - M * M) / (E * G - F * F)
    return Kout
