"""Command line front-end for the residual checks.

Exit codes: 0 when every check passes, 1 on any residual failure, 2 on bad input.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import sys

import numpy as np

from . import contact as Ct
from . import correspondence as C
from . import suite as S
from .errors import ConfigError, ContactRollError
from .identities import identity_suite
from .report import ResidualReport
from .scenarios import DEFAULT_BOUNDS, PAIRS, SCENARIOS, scenario_field


EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


def _emit_json(obj, out=None):
    out = out or sys.stdout
    json.dump(obj, out, indent=2, sort_keys=False)
    out.write("\n")


def _parse_point(s: str, n: int = 3) -> tuple:
    try:
        p = tuple(float(x) for x in s.split(","))
    except ValueError:
        raise ConfigError(f"point must be {n} comma-separated numbers, got {s!r}") from None
    if len(p) != n:
        raise ConfigError(f"point must have {n} coordinates, got {s!r}")
    return p


def _parse_bounds(s: str, n: int) -> tuple:
    """``lo:hi,lo:hi[,lo:hi]``."""
    try:
        pairs = [tuple(float(x) for x in part.split(":")) for part in s.split(",")]
    except ValueError:
        raise ConfigError(f"bounds must look like lo:hi,lo:hi, got {s!r}") from None
    if len(pairs) != n or any(len(p) != 2 for p in pairs):
        raise ConfigError(f"bounds need {n} lo:hi pairs, got {s!r}")
    return tuple(pairs)


def _load_config(path: str) -> dict:
    try:
        with open(path) as fh:
            d = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path!r}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path!r} is not valid JSON: {exc}") from None
    if not isinstance(d, dict):
        raise ConfigError("config must be a JSON object")
    return d


def _finish(rep: ResidualReport, echo: dict, out=None) -> int:
    _emit_json(rep.to_dict(echo), out)
    return EXIT_OK if rep.all_passed else EXIT_FAIL


def cmd_report(args) -> int:
    d = _load_config(args.config) if args.config else {}
    for key in ("scenario", "sigma", "grid", "checks", "perturb", "seed", "c_samples"):
        val = getattr(args, key)
        if val is not None:
            d[key] = val
    if args.bounds:
        d["bounds"] = _parse_bounds(args.bounds, 3)
    cfg = S.ScenarioConfig.from_dict(d)
    rep = S.run_report(cfg)
    return _finish(rep, cfg.echo())


def cmd_identity(args) -> int:
    rep = identity_suite(args.seed, args.samples, tol=args.tol, correspondence=not args.no_correspondence)
    echo = {"seed": args.seed, "samples": args.samples, "tol": args.tol, "correspondence": not args.no_correspondence}
    return _finish(rep, echo)


def _coeff_table(P: C.PolyCoeffs) -> list:
    rows = []
    for (i, j), val in sorted(P.coeffs.items(), key=lambda kv: (-(kv[0][0] + kv[0][1]), -kv[0][0])):
        rows.append({
            "monomial": P.label(i, j),
            "re": float(np.real(val)),
            "im": float(np.imag(val)),
            "scale": float(P.scale(i, j)),
        })
    return rows


def cmd_poly(args) -> int:
    sigma = S.parse_complex(args.sigma)
    point = _parse_point(args.point)
    field = scenario_field(args.scenario, sigma)
    f = C.build(field, point, order=5)
    P1 = C.p1_coefficients(f)
    rep = C.p1_claims(f, P1)
    out = {
        "config_echo": {"scenario": args.scenario, "sigma": S.format_complex(sigma), "point": list(point), "which": args.which},
        "P1": _coeff_table(P1),
    }
    if args.which == "p2":
        P2 = C.p2_coefficients(f)
        rep.extend(C.p2_vs_p1(f, P1, P2))
        out["P2"] = _coeff_table(P2)
    rep = S.retol(rep)
    out["records"] = [r.to_dict() for r in rep.sorted()]
    out["summary"] = rep.summary()
    _emit_json(out)
    return EXIT_OK if rep.all_passed else EXIT_FAIL


def cmd_leaf(args) -> int:
    sigma = S.parse_complex(args.sigma)
    nu, nv = S.parse_grid(args.grid, dims=(2,))
    scen = args.scenario
    (u0, u1), (v0, v1) = _parse_bounds(args.bounds, 2) if args.bounds else DEFAULT_BOUNDS[scen][:2]
    field = scenario_field(scen, sigma)
    us, vs = np.linspace(u0, u1, nu), np.linspace(v0, v1, nv)
    mesh = Ct.leaf_integrate(field, args.w0, us, vs, substeps=args.substeps)
    out = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        wr = csv.writer(out)
        wr.writerow(["u", "v", "w", "Re(x)", "Im(x)", "Re(y)", "Im(y)", "Re(z)", "Im(z)"])
        for row in mesh.rows():
            wr.writerow([repr(float(x)) for x in row])
    finally:
        if args.out:
            out.close()
    stats = {"path_gap": mesh.path_gap, "error": mesh.error, "w0": args.w0, "grid": [nu, nv]}
    if mesh.error is None and nu >= 5 and nv >= 5:
        Kc = Ct.mesh_curvature(mesh)
        dev = np.abs(Kc[2:-2, 2:-2] - _seed_curvature(field, us, vs))
        stats["curvature_maxdev"] = float(np.nanmax(dev)) if dev.size else None
    print(json.dumps(stats), file=sys.stderr if not args.out else sys.stdout)
    ok = mesh.error is None and mesh.path_gap < args.gap_tol
    return EXIT_OK if ok else EXIT_FAIL


def _seed_curvature(field, us, vs) -> complex:
    """Gauss curvature of the (constant-curvature) seed at the mesh centre."""
    from .surface import surface_jet

    sj = surface_jet(field.seed, float(np.mean(us)), float(np.mean(vs)), order=2)
    return complex(sj.K.value)


def cmd_grid(args) -> int:
    rep = ResidualReport()
    rows = []
    if args.pair:
        shape = S.parse_grid(args.grid or "15x15", dims=(2,))
        bounds = _parse_bounds(args.bounds, 2) if args.bounds else None
        full = S.rolling_report(args.pair, shape, bounds)
        sel = [r for r in full if r.check_id == args.check]
        if not sel:
            raise ConfigError(f"check {args.check!r} is not a rolling check; use eq2.* or roll.*")
        for r in sel:
            rep.records.append(r)
            rows.append(list(r.point) + [r.rel])
        header = ["u", "v", "rel"]
    else:
        family = args.check.split(".")[0]
        if family not in S.ALL_CHECKS:
            raise ConfigError(f"unknown check family {family!r}")
        cfg = S.ScenarioConfig(scenario=args.scenario, sigma=args.sigma, grid=args.grid or "9x9x5", checks=(family,))
        if args.bounds:
            cfg.bounds = _parse_bounds(args.bounds, 3)
        cfg = cfg.normalized()
        full = S.run_report(cfg)
        for r in full:
            if r.check_id == args.check:
                rep.records.append(r)
                rows.append(list(r.point) + [r.rel])
        if not rows:
            raise ConfigError(f"check {args.check!r} produced no records")
        header = ["u", "v", "w", "rel"]
    wr = csv.writer(sys.stdout)
    wr.writerow(header)
    for row in rows:
        wr.writerow([repr(float(x)) if math.isfinite(x) else "nan" for x in row])
    return EXIT_OK if rep.all_passed else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="contactroll", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("report", help="run residual checks over a parameter grid")
    p.add_argument("--config", help="JSON file with report settings; flags override it")
    p.add_argument("--scenario", choices=sorted(SCENARIOS))
    p.add_argument("--sigma", help="Bäcklund angle, complex allowed (0.6, 0.5i, 1+2i)")
    p.add_argument("--grid", help="NxMxP grid over (u, v, w)")
    p.add_argument("--bounds", help="lo:hi,lo:hi,lo:hi")
    p.add_argument("--checks", help=f"comma list from {','.join(S.ALL_CHECKS)}")
    p.add_argument("--perturb", type=float, help="size of a tangential bump added to V")
    p.add_argument("--seed", type=int)
    p.add_argument("--c-samples", dest="c_samples", type=int, help="random (c1, c2, c4) triples per point")
    p.set_defaults(fn=cmd_report)

    p = sub.add_parser("identity", help="seeded property suite for the algebraic identities")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--no-correspondence", action="store_true", help="skip the random-field correspondence claims")
    p.set_defaults(fn=cmd_identity)

    p = sub.add_parser("poly", help="extract the quartic coefficients at one point")
    p.add_argument("--scenario", choices=sorted(SCENARIOS), default="pseudosphere")
    p.add_argument("--sigma", default="0.6")
    p.add_argument("--point", required=True, help="u,v,w")
    p.add_argument("--which", choices=("p1", "p2"), default="p1")
    p.set_defaults(fn=cmd_poly)

    p = sub.add_parser("leaf", help="integrate one leaf and write the mesh as CSV")
    p.add_argument("--scenario", choices=sorted(SCENARIOS), default="pseudosphere")
    p.add_argument("--sigma", default="0.6")
    p.add_argument("--w0", type=float, default=1.0)
    p.add_argument("--grid", default="33x33")
    p.add_argument("--bounds", help="lo:hi,lo:hi")
    p.add_argument("--substeps", type=int, default=1)
    p.add_argument("--gap-tol", type=float, default=1e-6)
    p.add_argument("--out", help="CSV path (default stdout; stats go to stderr)")
    p.set_defaults(fn=cmd_leaf)

    p = sub.add_parser("grid", help="CSV of one check's relative residual over a grid")
    p.add_argument("--check", required=True)
    p.add_argument("--pair", choices=PAIRS, help="isometric pair for rolling checks")
    p.add_argument("--scenario", choices=sorted(SCENARIOS), default="pseudosphere")
    p.add_argument("--sigma", default="0.6")
    p.add_argument("--grid")
    p.add_argument("--bounds")
    p.set_defaults(fn=cmd_grid)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.fn(args)
    except ConfigError as exc:
        print(f"contactroll: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ContactRollError as exc:
        print(f"contactroll: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
