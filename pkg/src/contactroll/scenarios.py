"""Built-in surfaces and the contact fields built on them."""

from __future__ import annotations

import cmath
from dataclasses import dataclass

import numpy as np

from . import jets as J
from . import kernel as K
from .contact import ContactField
from .errors import ConfigError, DegenerateMetricError
from .surface import ParametricSurface


def _sech(x):
    return J.reciprocal(J.cosh(x))


def _plane(u, v):
    return K.vec(u, v, 0.0 * u)


def _sphere(u, v):
    return K.vec(J.cos(u) * J.cos(v), J.cos(u) * J.sin(v), J.sin(u))


def _tractroid(u, v):
    s = _sech(u)
    return K.vec(s * J.cos(v), s * J.sin(v), u - J.tanh(u))


def _catenoid(u, v):
    return K.vec(J.cosh(v) * J.cos(u), J.cosh(v) * J.sin(u), v)


def _helicoid(u, v):
    return K.vec(J.sinh(v) * J.sin(u), -J.sinh(v) * J.cos(u), u)


def _cylinder(u, v):
    return K.vec(J.cos(u), J.sin(u), v)


def _ellipsoid(a, b, c):
    def rule(u, v):
        return K.vec(a * J.cos(u) * J.cos(v), b * J.cos(u) * J.sin(v), c * J.sin(u))

    return rule


def _random_trig(seed: int, terms: int = 4, amplitude: float = 0.15):
    rng = np.random.default_rng(seed)
    ks = rng.integers(-2, 3, size=(terms, 2))
    amps = amplitude * rng.standard_normal(terms)
    phases = rng.uniform(0, 2 * np.pi, size=terms)

    def rule(u, v):
        h = 0.0 * u
        for (k, l), a, p in zip(ks, amps, phases):
            h = h + float(a) * J.cos(float(k) * u + float(l) * v + float(p))
        return K.vec(u, v, h)

    return rule


def _rigid(base, Q, c):
    Q = np.asarray(Q, dtype=complex)
    c = np.asarray(c, dtype=complex)

    def rule(u, v):
        x = base(u, v)
        return K.matvec(Q, x) + c if not isinstance(x, J.Jet) else K.matvec(J.Jet.constant(x.spec, Q), x) + c

    return rule


_DOMAINS = {
    "plane": ((-2.0, 2.0), (-2.0, 2.0)),
    "sphere": ((-1.2, 1.2), (-np.pi, np.pi)),
    "tractroid": ((0.2, 3.0), (-np.pi, np.pi)),
    "catenoid": ((-np.pi, np.pi), (-1.5, 1.5)),
    "helicoid": ((-np.pi, np.pi), (-1.5, 1.5)),
    "cylinder": ((-np.pi, np.pi), (-2.0, 2.0)),
    "ellipsoid": ((-1.2, 1.2), (-np.pi, np.pi)),
    "random_trig": ((-1.5, 1.5), (-1.5, 1.5)),
}

SURFACES = tuple(_DOMAINS)


def make_surface(name: str, **params) -> ParametricSurface:
    """A built-in analytic surface; ``random_trig`` takes ``seed``, ``ellipsoid`` takes ``axes``."""
    if name not in _DOMAINS:
        raise ConfigError(f"unknown surface {name!r}; expected one of {', '.join(SURFACES)}")
    rules = {
        "plane": _plane,
        "sphere": _sphere,
        "tractroid": _tractroid,
        "catenoid": _catenoid,
        "helicoid": _helicoid,
        "cylinder": _cylinder,
    }
    if name == "ellipsoid":
        rule = _ellipsoid(*params.get("axes", (1.0, 1.3, 0.8)))
    elif name == "random_trig":
        rule = _random_trig(int(params.get("seed", 0)))
    else:
        rule = rules[name]
    return ParametricSurface(name, rule, _DOMAINS[name])


def random_rotation(rng: np.random.Generator, complex_angles: bool = False) -> np.ndarray:
    """A rotation (R^T R = I, det R = 1), complex if requested."""
    a = rng.standard_normal(3) + (1j * 0.3 * rng.standard_normal(3) if complex_angles else 0)
    return _expm_so3(a)


def _expm_so3(a) -> np.ndarray:
    A = K.alpha(np.asarray(a, dtype=complex))
    t2 = complex(np.dot(a, a))
    t = cmath.sqrt(t2)
    if abs(t) < 1e-8:
        return np.eye(3) + A + A @ A / 2
    return np.eye(3) + np.sin(t) / t * A + (1 - np.cos(t)) / t2 * (A @ A)


PAIRS = ("catenoid_helicoid", "plane_cylinder", "rigid_motion")


def make_isometric_pair(name: str, seed: int = 0, base: str = "ellipsoid"):
    """Two surfaces sharing a parametrization with equal first fundamental forms."""
    if name == "catenoid_helicoid":
        return make_surface("catenoid"), make_surface("helicoid")
    if name == "plane_cylinder":
        return make_surface("plane"), make_surface("cylinder")
    if name == "rigid_motion":
        rng = np.random.default_rng(seed)
        x0 = make_surface(base, seed=seed)
        Q = random_rotation(rng)
        c = rng.standard_normal(3)
        return x0, ParametricSurface(f"rigid_motion({base})", _rigid(x0.rule, Q, c), x0.domain)
    raise ConfigError(f"unknown isometric pair {name!r}; expected one of {', '.join(PAIRS)}")


def tangent_frame(sj):
    """Gram-Schmidt of (x_u, x_v): e1 along x_u, e2 in the tangent plane."""
    E, F, G = sj.E, sj.F, sj.G
    e1 = sj.xu * J.reciprocal(J.sqrt(E))
    det = G - F * F / E
    if abs(det.value) < 1e-14:
        raise DegenerateMetricError(det.value)
    e2 = (sj.xv - sj.xu * (F / E)) * J.reciprocal(J.sqrt(det))
    return e1, e2


#: the factor rho = 1 / sqrt(-K) of the constant-curvature Bäcklund fields
_RHO = {"tractroid": 1.0, "sphere": 1j}


def backlund_field(seed: str = "tractroid", sigma: complex = 0.6, rho: complex | None = None) -> ContactField:
    """The classical Bäcklund distribution over a constant-curvature seed.

    ``V = rho sin(sigma) (cos w e1 + sin w e2)`` and ``mb = rho cos(sigma)`` with
    ``rho^2 = -1/K``, so that ``mb^2 + |V|^2 = -1/K``.
    """
    if seed not in _RHO:
        raise ConfigError(f"Bäcklund fields are built on tractroid or sphere, not {seed!r}")
    sigma = complex(sigma)
    s, c = cmath.sin(sigma), cmath.cos(sigma)
    if abs(s) < 1e-12 or abs(c) < 1e-12:
        raise ConfigError("sigma must have sin(sigma) != 0 and cos(sigma) != 0")
    rho = _RHO[seed] if rho is None else complex(rho)
    surf = make_surface(seed)

    def V_rule(sj, W):
        e1, e2 = tangent_frame(sj)
        return (e1 * J.cos(W) + e2 * J.sin(W)) * (rho * s)

    def m_rule(sj, W):
        return rho * c

    return ContactField(f"backlund({seed}, sigma={sigma})", surf, V_rule, m_rule)


@dataclass(frozen=True)
class TrigPoly:
    """sum_k a_k cos(k . (u, v, w) + p_k) with small integer frequencies."""

    freqs: tuple
    amps: tuple
    phases: tuple
    const: float = 0.0

    @classmethod
    def random(cls, rng, terms=3, const=1.0, amp=0.3):
        return cls(
            tuple(tuple(int(x) for x in rng.integers(-1, 2, size=3)) for _ in range(terms)),
            tuple(float(x) for x in amp * rng.standard_normal(terms)),
            tuple(float(x) for x in rng.uniform(0, 2 * np.pi, size=terms)),
            const,
        )

    def __call__(self, U, V, W):
        out = self.const + 0.0 * U
        for (a, b, c), amp, p in zip(self.freqs, self.amps, self.phases):
            out = out + amp * J.cos(a * U + b * V + c * W + p)
        return out


def random_tangent_field(seed: int, surface: ParametricSurface | None = None, derive_m: bool = False) -> ContactField:
    """``V = a e1 + b e2`` with random trigonometric a, b; ``mb`` random or derived."""
    rng = np.random.default_rng(seed)
    surface = surface or make_surface("random_trig", seed=seed)
    a = TrigPoly.random(rng, const=0.8)
    b = TrigPoly.random(rng, const=0.2)
    # ensure w-dependence so that the fibres are regular
    a = TrigPoly(a.freqs + ((0, 0, 1),), a.amps + (0.5,), a.phases + (0.0,), a.const)
    b = TrigPoly(b.freqs + ((0, 0, 1),), b.amps + (0.5,), b.phases + (-np.pi / 2,), b.const)
    mpoly = TrigPoly.random(rng, const=1.5, amp=0.2)

    def V_rule(sj, W):
        e1, e2 = tangent_frame(sj)
        U = J.seed_variable(sj.spec, "u", sj.point[0])
        Vv = J.seed_variable(sj.spec, "v", sj.point[1])
        return e1 * a(U, Vv, W) + e2 * b(U, Vv, W)

    def m_rule(sj, W):
        U = J.seed_variable(sj.spec, "u", sj.point[0])
        Vv = J.seed_variable(sj.spec, "v", sj.point[1])
        return mpoly(U, Vv, W)

    return ContactField(f"random_tangent({seed})", surface, V_rule, None if derive_m else m_rule)


#: default (u, v, w) boxes, inside each seed's domain
DEFAULT_BOUNDS = {
    "pseudosphere": ((0.6, 1.4), (-0.5, 0.5), (0.3, 1.3)),
    "sphere": ((-0.6, 0.6), (-0.5, 0.5), (0.3, 1.3)),
}

SCENARIOS = {"pseudosphere": "tractroid", "sphere": "sphere"}


def scenario_field(name: str, sigma) -> ContactField:
    if name not in SCENARIOS:
        raise ConfigError(f"unknown scenario {name!r}; expected one of {', '.join(SCENARIOS)}")
    return backlund_field(SCENARIOS[name], sigma)


def grid_points(bounds, shape):
    axes = [np.linspace(lo, hi, n) if n > 1 else np.array([(lo + hi) / 2]) for (lo, hi), n in zip(bounds, shape)]
    mesh = np.meshgrid(*axes, indexing="ij")
    return [tuple(float(m[idx]) for m in mesh) for idx in np.ndindex(*shape)]


def tangent_perturbation(eps: float):
    """A smooth tangential bump ``eps sin(u + v + 2w) e2`` to add to V, or None when eps = 0."""
    if not eps:
        return None

    def perturb(sj, W):
        _, e2 = tangent_frame(sj)
        U = J.seed_variable(sj.spec, "u", sj.point[0])
        Vv = J.seed_variable(sj.spec, "v", sj.point[1])
        return e2 * (eps * J.sin(U + Vv + 2.0 * W))

    return perturb
