"""Per-point check runners and grid sweeps shared by the command line and tests."""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from functools import lru_cache

import numpy as np

from . import contact as Ct
from . import correspondence as C
from .errors import ConfigError, ContactRollError, FSystemSingular
from .forms import Form1
from .report import ResidualRecord, ResidualReport
from .scenarios import DEFAULT_BOUNDS, SCENARIOS, grid_points, make_isometric_pair, tangent_perturbation
from .surface import roll, rolling_residuals

CONTACT_CHECKS = ("eq4", "eq5", "eq6", "eq7", "cons")
CORR_CHECKS = ("tiom", "mtcj", "R1", "P1", "P2", "abc", "F")
ALL_CHECKS = CONTACT_CHECKS + CORR_CHECKS
DEFAULT_CHECKS = ("eq4", "eq5", "eq6", "eq7", "cons", "tiom", "mtcj", "R1")

#: default tolerances by check-id prefix (longest prefix wins)
TOLERANCES = {
    "eq2": 1e-8, "roll": 1e-8,
    "eq4": 1e-8, "eq5": 1e-8, "eq6": 1e-8, "eq7": 1e-8, "cons": 1e-8,
    "tiom": 1e-8, "mtcj": 1e-7, "L3": 1e-8, "R1": 1e-7,
    "P1": 1e-7, "P1.interp": 1e-10, "P1.degree": 1e-10, "P2": 1e-7,
    "abc": 1e-7, "F": 1e-6, "R3": 1e-5,
}


def parse_complex(x) -> complex:
    """Accept numbers and strings like ``0.6``, ``0.5i``, ``1-2i``, ``i``."""
    if isinstance(x, (int, float, complex)):
        return complex(x)
    s = str(x).strip().replace(" ", "").replace("I", "i")
    if s in ("i", "+i"):
        return 1j
    if s == "-i":
        return -1j
    if s.endswith("i") and s[:-1].endswith(("+", "-")):
        s = s[:-1] + "1i"
    try:
        return complex(s.replace("i", "j"))
    except ValueError:
        raise ConfigError(f"cannot parse complex number {x!r}") from None


def parse_grid(s, dims=(2, 3)) -> tuple:
    if isinstance(s, (list, tuple)):
        parts = [int(p) for p in s]
    else:
        try:
            parts = [int(p) for p in str(s).lower().split("x")]
        except ValueError:
            raise ConfigError(f"grid must look like NxM or NxMxP, got {s!r}") from None
    if len(parts) not in dims or any(p < 1 for p in parts):
        raise ConfigError(f"grid must have {' or '.join(map(str, dims))} positive sizes, got {s!r}")
    return tuple(parts)


def tolerance_for(check_id: str, overrides: dict | None = None) -> float:
    table = dict(TOLERANCES)
    table.update(overrides or {})
    best, tol = -1, 1e-8
    for prefix, t in table.items():
        if (check_id == prefix or check_id.startswith(prefix + ".") or check_id.startswith(prefix)) and len(prefix) > best:
            best, tol = len(prefix), float(t)
    return tol


def retol(rep: ResidualReport, overrides: dict | None = None) -> ResidualReport:
    out = ResidualReport()
    for r in rep:
        out.records.append(ResidualRecord(r.check_id, r.point, r.residual, r.scale, r.rel, tolerance_for(r.check_id, overrides)))
    return out


@dataclass
class ScenarioConfig:
    scenario: str = "pseudosphere"
    sigma: complex = 0.6
    grid: tuple = (9, 9, 5)
    bounds: tuple | None = None
    checks: tuple = DEFAULT_CHECKS
    perturb: float = 0.0
    seed: int = 0
    c_samples: int = 3
    tolerances: dict = field(default_factory=dict)

    @classmethod
    def from_dict(cls, d: dict) -> "ScenarioConfig":
        known = set(cls.__dataclass_fields__)
        extra = set(d) - known
        if extra:
            raise ConfigError(f"unknown config keys: {', '.join(sorted(extra))}")
        cfg = cls(**d)
        return cfg.normalized()

    def normalized(self) -> "ScenarioConfig":
        if self.scenario not in SCENARIOS:
            raise ConfigError(f"unknown scenario {self.scenario!r}; expected one of {', '.join(SCENARIOS)}")
        self.sigma = parse_complex(self.sigma)
        self.grid = parse_grid(self.grid, dims=(3,))
        self.bounds = tuple(tuple(float(x) for x in b) for b in (self.bounds or DEFAULT_BOUNDS[self.scenario]))
        if len(self.bounds) != 3:
            raise ConfigError("bounds must give three (lo, hi) pairs")
        if isinstance(self.checks, str):
            self.checks = tuple(c for c in self.checks.split(",") if c)
        self.checks = tuple(self.checks)
        bad = [c for c in self.checks if c not in ALL_CHECKS]
        if bad:
            raise ConfigError(f"unknown checks {bad}; expected a subset of {', '.join(ALL_CHECKS)}")
        self.perturb = float(self.perturb)
        self.seed = int(self.seed)
        self.c_samples = int(self.c_samples)
        self.tolerances = {str(k): float(v) for k, v in dict(self.tolerances).items()}
        return self

    def echo(self) -> dict:
        d = asdict(self)
        d["sigma"] = format_complex(self.sigma)
        d["grid"] = "x".join(map(str, self.grid))
        d["bounds"] = [list(b) for b in self.bounds]
        d["checks"] = list(self.checks)
        return d


def format_complex(z: complex) -> str:
    z = complex(z)
    if z.imag == 0:
        return repr(z.real)
    if z.real == 0:
        return f"{z.imag!r}i"
    return f"{z.real!r}{'+' if z.imag >= 0 else '-'}{abs(z.imag)!r}i"


@lru_cache(maxsize=16)
def _field(scenario: str, sigma: complex, perturb: float):
    from .scenarios import scenario_field

    f = scenario_field(scenario, sigma)
    return f, tangent_perturbation(perturb)


def tangential_omega(cj: Ct.ContactJet, rng: np.random.Generator) -> Form1:
    """A random constant-coefficient connection with N0^T omega = 0."""
    a = rng.standard_normal(4)
    xu, xv = cj.sj.xu, cj.sj.xv
    return Form1({"u": xu * a[0] + xv * a[1], "v": xu * a[2] + xv * a[3]}, "uv")


def contact_checks(cj: Ct.ContactJet, checks, rng) -> ResidualReport:
    rep = ResidualReport()
    pt = cj.point
    want = set(checks)
    if want & {"eq4", "eq5", "eq6"}:
        for r in Ct.integrability_residuals(cj):
            if r.check_id.split(".")[0] in want:
                rep.records.append(r)
    if "eq7" in want:
        for name, om in (("eq7.zero", None), ("eq7.tangential", tangential_omega(cj, rng))):
            dw = Ct.dw_form(cj, om)
            trip, _ = Ct.leaf_condition_residual(cj, om, dw)
            rep.add_triplet(name, pt, trip, 1e-8)
    if "cons" in want:
        rep.add_triplet("cons", pt, Ct.consistency_residual(cj), 1e-8)
    return rep


def _random_c(rng):
    c = rng.uniform(-1.5, 1.5, 3) + 1j * rng.uniform(-1.0, 1.0, 3)
    return tuple(complex(x) for x in c)


def cascade_checks(f: C.CorrFrame, rng) -> ResidualReport:
    """Determinant claim plus the rank-one structure that blocks R3."""
    rep = ResidualReport()
    pt = f.point
    c1, c2 = (float(x) for x in rng.uniform(-1, 1, 2))
    p, q = (float(x) for x in rng.uniform(-1, 1, 2))
    try:
        coeffs, claim = C.determinant_leading(f, c2=c2)
        lead = complex(coeffs[4])
        rep.add_triplet("F.det.leading", pt, C.rel_of([lead, -claim]), 1e-6)
        rep.add_triplet("F.det.leading.abs", pt, C.rel_of([abs(lead), -abs(claim)]), 1e-6)
    except ContactRollError:
        rep.add("F.det.leading", pt, math.nan, math.nan, math.nan, 1e-6)
    try:
        rep.extend(g_degree_checks(f, c1, c2))
        rep.add_triplet("R3", pt, C.r3_residual(f, c1, c2, p, q), 1e-5)
    except FSystemSingular as exc:
        for cid, tol in (("G.degree.1", 1e-8), ("G.degree.2", 1e-8), ("R3", 1e-5)):
            rep.add(cid, pt, abs(exc.det), exc.scale, math.nan, tol)
    D, emb, _ = C.d_eval(f, c1, c2)
    A, _ = C.f_matrix(D, emb, p, q)
    sv = np.linalg.svd(A, compute_uv=False)
    # passes when the derived second-order system has rank one
    rep.add("F.rank1", pt, sv[1], sv[0], sv[1] / sv[0], 1e-6)
    return rep


def g_degree_checks(f: C.CorrFrame, c1, c2, tol: float = 1e-8) -> ResidualReport:
    """G1 and G2 cubic in (d_u c2, d_v c2): fit on a 4x4 grid, probe off-grid."""
    rep = ResidualReport()
    nodes = np.array([-1.5, -0.5, 0.5, 1.5])
    mono = [(i, j) for i in range(4) for j in range(4 - i)]
    rows, vals = [], []
    for p in nodes:
        for q in nodes:
            rows.append([p**i * q**j for i, j in mono])
            vals.append(C.g_eval(f, c1, c2, p, q))
    coef, *_ = np.linalg.lstsq(np.array(rows), np.array(vals), rcond=None)
    p, q = 0.37, -0.81
    probe = np.array([p**i * q**j for i, j in mono]) @ coef
    direct = C.g_eval(f, c1, c2, p, q)
    for k in range(2):
        rep.add_triplet(f"G.degree.{k + 1}", f.point, C.rel_of([direct[k], -probe[k]]), tol)
    return rep


def correspondence_checks(cj: Ct.ContactJet, checks, rng, c_samples: int = 3) -> ResidualReport:
    rep = ResidualReport()
    want = set(checks)
    f = C.frame_build(cj)
    if "tiom" in want:
        for _ in range(c_samples):
            rep.extend(C.tiom_residuals(f, *_random_c(rng)))
    if "mtcj" in want:
        rep.extend(C.mtcj_checks(f))
        rep.add_triplet("L3.4.quad", f.point, C.l3_fourth_quadratic(f), 1e-10)
    if "R1" in want:
        rep.extend(C.r1_residuals(f))
    P1 = None
    if "P1" in want or "P2" in want:
        P1 = C.p1_coefficients(f)
    if "P1" in want:
        rep.extend(C.p1_claims(f, P1))
    if "P2" in want:
        rep.extend(C.p2_vs_p1(f, P1))
    if "abc" in want:
        rep.extend(C.abc_checks(f))
    if "F" in want:
        rep.extend(cascade_checks(f, rng))
    return rep


def point_report(cfg: ScenarioConfig, point, index: int = 0) -> ResidualReport:
    field_, perturb = _field(cfg.scenario, cfg.sigma, cfg.perturb)
    rng = np.random.default_rng([cfg.seed, index])
    needs_corr = any(c in CORR_CHECKS for c in cfg.checks)
    order = (6 if "F" in cfg.checks else 5) if needs_corr else 3
    rep = ResidualReport()
    u, v, w = point
    try:
        cj = Ct.contact_jet(field_, u, v, w, order=order, perturb=perturb)
        rep.extend(contact_checks(cj, cfg.checks, rng))
        if needs_corr:
            rep.extend(correspondence_checks(cj, cfg.checks, rng, cfg.c_samples))
    except ContactRollError as exc:
        rep.add(f"error.{type(exc).__name__}", point, math.nan, math.nan, math.nan, 0.0)
    return retol(rep, cfg.tolerances)


def _point_job(args):
    cfg, point, index = args
    return point_report(cfg, point, index).records


def threads() -> int:
    raw = os.environ.get("CONTACTROLL_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError(f"CONTACTROLL_THREADS must be an integer, got {raw!r}") from None
    return max(1, n)


def run_report(cfg: ScenarioConfig, workers: int | None = None) -> ResidualReport:
    pts = grid_points(cfg.bounds, cfg.grid)
    jobs = [(cfg, p, i) for i, p in enumerate(pts)]
    workers = workers or threads()
    rep = ResidualReport()
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            for recs in ex.map(_point_job, jobs):
                rep.records.extend(recs)
    else:
        for job in jobs:
            rep.records.extend(_point_job(job))
    return rep.sorted()


# -- rolling --------------------------------------------------------------------

PAIR_BOUNDS = {
    "catenoid_helicoid": ((-2.5, 2.5), (-1.2, 1.2)),
    "plane_cylinder": ((-2.5, 2.5), (-1.5, 1.5)),
    "rigid_motion": ((-1.0, 1.0), (-2.5, 2.5)),
}


def rolling_report(pair: str, grid=(15, 15), bounds=None, seed: int = 0, identity: bool = False, order: int = 3) -> ResidualReport:
    x0, x = make_isometric_pair(pair, seed=seed)
    if identity:
        x = x0
    bounds = bounds or PAIR_BOUNDS[pair]
    rep = ResidualReport()
    for u, v in grid_points(bounds, grid):
        fr = roll(x0, x, u, v, order=order)
        for cid, trip in rolling_residuals(fr).items():
            rep.add_triplet(cid, (u, v), trip, tolerance_for(cid))
    return rep.sorted()


def rolling_exact_zero(pair: str = "catenoid_helicoid", grid=(5, 5)) -> float:
    """Largest |omega| coefficient of the identity rolling (exactly 0 by construction)."""
    x0, _ = make_isometric_pair(pair)
    worst = 0.0
    for u, v in grid_points(PAIR_BOUNDS[pair], grid):
        fr = roll(x0, x0, u, v)
        for d in ("u", "v"):
            worst = max(worst, float(np.max(np.abs(fr.omega[d].c))))
    return worst
