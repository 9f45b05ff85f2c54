"""Parametric surfaces as jets, and the rolling of isometric pairs."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import forms
from . import jets as J
from . import kernel as K
from .errors import DegenerateMetricError, DomainError, NotIsometricError
from .jets import Jet, JetSpec

#: |x_u x x_v|^2 below this is a degenerate metric
METRIC_THRESHOLD = 1e-12


@dataclass(frozen=True)
class ParametricSurface:
    """``rule(u, v)`` returns a Cx3 (array or jet) from two scalars or scalar jets."""

    name: str
    rule: Callable
    domain: tuple | None = None

    def check_domain(self, u: float, v: float):
        if self.domain is None:
            return
        (u0, u1), (v0, v1) = self.domain
        if not (u0 <= u <= u1 and v0 <= v <= v1):
            raise DomainError(f"({u}, {v}) outside the domain of {self.name}: {self.domain}")

    def __call__(self, u, v):
        return self.rule(u, v)

    def point(self, u: float, v: float) -> np.ndarray:
        return np.asarray(self.rule(complex(u), complex(v)), dtype=complex)


def uv_spec(order: int) -> JetSpec:
    return JetSpec.total(("u", "v"), order)


@dataclass
class SurfaceJet:
    """All the local invariants of a surface at one point, as jets.

    The jets live in ``spec``; if ``spec`` contains further variables (``w``
    or auxiliary ones) the surface simply does not depend on them.
    """

    point: tuple
    spec: JetSpec
    x: Jet
    xu: Jet
    xv: Jet
    N: Jet
    E: Jet
    F: Jet
    G: Jet
    L: Jet
    M: Jet
    Nn: Jet
    K: Jet

    @property
    def Nu(self) -> Jet:
        return self.N.diff("u")

    @property
    def Nv(self) -> Jet:
        return self.N.diff("v")

    @property
    def area2(self) -> Jet:
        """E G - F^2 = |x_u x x_v|^2."""
        return self.E * self.G - self.F * self.F

    def metric_inverse(self):
        d = self.area2
        return ((self.G / d, -self.F / d), (-self.F / d, self.E / d))

    def dx(self) -> forms.Form1:
        return forms.Form1({"u": self.xu, "v": self.xv}, "uv")

    def dN(self) -> forms.Form1:
        return forms.Form1({"u": self.Nu, "v": self.Nv}, "uv")


def surface_jet(
    s: ParametricSurface,
    u: float,
    v: float,
    order: int = 3,
    spec: JetSpec | None = None,
    normal_sign: complex = 1.0,
    check_domain: bool = True,
) -> SurfaceJet:
    """Evaluate ``s`` and its invariants at ``(u, v)``.

    Every differentiation loses one order: with jets of order ``n`` the normal
    is exact to order ``n - 1`` and ``K`` to order ``n - 2``.
    """
    if check_domain:
        s.check_domain(u, v)
    spec = spec or uv_spec(order)
    U = J.seed_variable(spec, "u", u)
    V = J.seed_variable(spec, "v", v)
    x = s.rule(U, V)
    if not isinstance(x, Jet):
        x = Jet.constant(spec, x)
    xu, xv = x.diff("u"), x.diff("v")
    n = K.cross(xu, xv)
    nn = K.dot(n, n)
    if abs(nn.value) < METRIC_THRESHOLD:
        raise DegenerateMetricError(nn.value)
    N = n * J.reciprocal(J.sqrt(nn)) * normal_sign
    E, F, G = K.dot(xu, xu), K.dot(xu, xv), K.dot(xv, xv)
    L = K.dot(xu.diff("u"), N)
    M = K.dot(xu.diff("v"), N)
    Nn = K.dot(xv.diff("v"), N)
    Kc = (L * Nn - M * M) / (E * G - F * F)
    return SurfaceJet((u, v), spec, x, xu, xv, N, E, F, G, L, M, Nn, Kc)


def gauss_curvature_from_normal(sj: SurfaceJet) -> Jet:
    """K as N^T(N_u x N_v) / N^T(x_u x x_v), an independent route to the curvature."""
    return K.triple(sj.N, sj.Nu, sj.Nv) / K.triple(sj.N, sj.xu, sj.xv)


def isometry_residual(x0: ParametricSurface, x: ParametricSurface, u: float, v: float):
    """Differences (dE, dF, dG) of the first fundamental forms at a point."""
    a = surface_jet(x0, u, v, 1)
    b = surface_jet(x, u, v, 1)
    return tuple(complex(p.value - q.value) for p, q in ((a.E, b.E), (a.F, b.F), (a.G, b.G)))


@dataclass
class RollingFrame:
    point: tuple
    R: Jet
    t: Jet
    omega: forms.Form1
    flipped: bool
    seed: SurfaceJet
    target: SurfaceJet

    @property
    def R_other(self) -> Jet:
        """Rotation of the rolling with the other face of the seed (det -1)."""
        N0 = self.seed.N
        P = K.identity(N0) - 2.0 * (N0[:, None] * N0[None, :])
        return K.matmul(self.R, P)


def roll(
    x0: ParametricSurface,
    x: ParametricSurface,
    u: float,
    v: float,
    order: int = 3,
    spec: JetSpec | None = None,
    check_isometry: bool = True,
) -> RollingFrame:
    """Rolling of ``x0`` on the isometric surface ``x`` at ``(u, v)``.

    ``R = [x_u x_v N][x0_u x0_v N0]^-1`` with the orientation of ``N`` chosen so
    that ``det R = +1``; ``omega = alpha^-1(R^-1 dR)``.
    """
    spec = spec or uv_spec(order)
    s0 = surface_jet(x0, u, v, spec=spec)
    if x is x0:
        R = Jet.constant(spec, np.eye(3))
        flipped = False
        s1 = s0
    else:
        s1 = surface_jet(x, u, v, spec=spec)
        if check_isometry:
            gaps = [abs((p - q).value) for p, q in ((s0.E, s1.E), (s0.F, s1.F), (s0.G, s1.G))]
            scale = 1.0 + abs(s0.E.value) + abs(s0.G.value)
            if max(gaps) > 1e-8 * scale:
                raise NotIsometricError(f"first fundamental forms differ by {max(gaps):.3e}")
        R = K.rotation_from_frames((s0.xu, s0.xv, s0.N), (s1.xu, s1.xv, s1.N))
        flipped = False
        if abs(K.det(R).value + 1.0) < 0.5:
            R = K.rotation_from_frames((s0.xu, s0.xv, s0.N), (s1.xu, s1.xv, -s1.N))
            flipped = True
    t = s1.x - K.matvec(R, s0.x)
    Rt = K.transpose(R)
    omega = forms.Form1({d: K.alpha_inv(K.matmul(Rt, R.diff(d)), value_only=True) for d in ("u", "v")}, "uv")
    return RollingFrame((u, v), R, t, omega, flipped, s0, s1)


def rolling_residuals(fr: RollingFrame) -> dict:
    """The three connection-form conditions plus frame sanity, as (abs, scale, rel)."""
    om = fr.omega
    s0 = fr.seed
    dom = forms.ext_d(om)
    half = forms.cross_wedge(om, om) * 0.5
    out = {
        "eq2.flat": forms.residual([dom, half]),
        "eq2.tangent": forms.residual([
            forms.Form2({("u", "v"): K.cross(om["u"], s0.xv)}),
            forms.Form2({("u", "v"): -K.cross(om["v"], s0.xu)}),
        ]),
    }
    perp = [abs(K.dot(s0.N, om[d]).value) for d in ("u", "v")]
    size = sum(float(np.max(np.abs(om[d].value))) for d in ("u", "v"))
    out["eq2.perp"] = (max(perp), size, max(perp) / (1.0 + size))
    # frame sanity
    RtR = K.matmul(K.transpose(fr.R), fr.R)
    out["roll.orth"] = forms.residual([RtR.value, -np.eye(3)])
    out["roll.det"] = forms.residual([K.det(fr.R).value, -1.0])
    dt = forms.Form1({d: fr.t.diff(d) for d in ("u", "v")}, "uv")
    dRx0 = forms.Form1({d: K.matvec(fr.R.diff(d), s0.x) for d in ("u", "v")}, "uv")
    out["roll.translation"] = forms.residual([dt, dRx0])
    dx = forms.Form1({d: K.matvec(fr.R, c) for d, c in (("u", s0.xu), ("v", s0.xv))}, "uv")
    out["roll.dx"] = forms.residual([fr.target.dx(), -dx])
    return out
