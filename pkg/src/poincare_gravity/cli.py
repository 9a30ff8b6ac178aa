"""Command line entry point: ``poincare-grav <command> [options]``."""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import experiments as ex
from .checks import PROPERTIES, TOLERANCE_PROFILES, run_suite
from .geometry import GeometryError
from .radiation import AngularGrid, RadiationError
from .scenario import (GEOMETRY_HEADER, ParseError, RunError, ValidationError, geometry_rows,
                       load_scenario, run, template_path, write_csv)
from .units import EARTH_MASS_KG, SI

# strict profile tightens the numerical checks by this factor
_STRICT = 0.1


def _tol(args, base: float) -> float:
    return base * (_STRICT if args.tolerance_profile == "strict" else 1.0)


def _report(check, verbose: bool = False) -> int:
    if verbose:
        for row in check.details:
            print("  " + ", ".join(f"{v:.6g}" if isinstance(v, float) else str(v) for v in row))
    print(check.line())
    return 0 if check.passed else 1


def _scenario_path(arg: str) -> Path:
    p = Path(arg)
    if p.exists() or p.suffix:
        return p
    return template_path(arg)


def cmd_simulate(args) -> int:
    scn = load_scenario(_scenario_path(args.scenario))
    if args.only:
        scn.outputs = [o for o in scn.outputs if o.kind in args.only]
        if not scn.outputs:
            raise ValidationError("known output kind", f"scenario has no {'/'.join(args.only)} output")
    manifest = run(scn, args.out, args.tolerance_profile, args.seed)
    print(f"{scn.name}: status={manifest['status']} outputs in {args.out}")
    if "experimental" in manifest:
        print(f"note: experimental ({manifest['experimental']})")
    return 0


def cmd_radiation(args) -> int:
    if args.scenario:
        args.only = ["radiation"]
        return cmd_simulate(args)
    grid = AngularGrid.product(args.n_theta, args.n_phi)
    status = _report(ex.larmor_check(grid=grid, tol=_tol(args, 1e-8)), args.verbose)
    if args.flux:
        status |= _report(ex.flux_check(tol=_tol(args, 1e-3)), args.verbose)
    return status


def cmd_newton(args) -> int:
    return _report(ex.newton_check(tol=_tol(args, 1e-6)), args.verbose)


def cmd_wep(args) -> int:
    return _report(ex.wep_check(n_steps=args.steps, tol=_tol(args, 1e-10)), args.verbose)


def cmd_algebra(args) -> int:
    rep = run_suite(args.trials, args.seed, args.tolerance_profile, args.properties)
    for line in rep.lines():
        print(line)
    print(f"seed={rep.seed} profile={rep.profile} seconds={rep.seconds:.1f}")
    return 0 if rep.passed else 1


def cmd_geometry(args) -> int:
    radii = np.geomspace(args.r_min, args.r_max, args.n) * args.mass
    rows = geometry_rows(args.mass, radii)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        write_csv(out / "geometry.csv", GEOMETRY_HEADER, rows)
    check = ex.clock_check(args.mass, radii / args.mass, tol=_tol(args, 1e-12))
    return _report(check, args.verbose)


def cmd_earth_power(args) -> int:
    p = ex.earth_power_si(args.mass, args.speed, args.radius)
    print(f"|P| = {abs(p):.4e} W (sign {'+' if p > 0 else '-'}, energy {'gained' if p > 0 else 'lost'})")
    return 0


def cmd_checks(args) -> int:
    funcs = {"kinetic": ex.kinetic_correction_check, "pde": ex.pde_check,
             "integrator": ex.integrator_check, "flux": ex.flux_check}
    status = 0
    for name in args.which or list(funcs):
        status |= _report(funcs[name](), args.verbose)
    return status


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tolerance-profile", choices=sorted(TOLERANCE_PROFILES), default="default")
    common.add_argument("--seed", type=int, default=0, help="seed for randomized property suites")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="poincare-grav", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", parents=[common], help="run a scenario file")
    s.add_argument("--scenario", required=True, help="TOML file or shipped template name")
    s.add_argument("--out", default="out")
    s.set_defaults(func=cmd_simulate, only=None)

    s = sub.add_parser("radiation", parents=[common],
                       help="Larmor vs quadrature check, or a scenario's radiation output")
    s.add_argument("--scenario")
    s.add_argument("--out", default="out")
    s.add_argument("--n-theta", type=int, default=64)
    s.add_argument("--n-phi", type=int, default=128)
    s.add_argument("--flux", action="store_true", help="also run the wave-zone flux check")
    s.set_defaults(func=cmd_radiation)

    s = sub.add_parser("newton-check", parents=[common], help="inverse-square limit")
    s.set_defaults(func=cmd_newton)

    s = sub.add_parser("wep-check", parents=[common], help="mass independence of test trajectories")
    s.add_argument("--steps", type=int, default=1000)
    s.set_defaults(func=cmd_wep)

    s = sub.add_parser("algebra-check", parents=[common], help="randomized algebra property suite")
    s.add_argument("--trials", type=int, default=10_000)
    s.add_argument("--properties", nargs="+", choices=list(PROPERTIES))
    s.set_defaults(func=cmd_algebra)

    s = sub.add_parser("geometry", parents=[common], help="static clock rates and g_tt")
    s.add_argument("--mass", type=float, default=1.0, help="source mass (geometrized)")
    s.add_argument("--r-min", type=float, default=10.0, help="in units of the source mass")
    s.add_argument("--r-max", type=float, default=1e6)
    s.add_argument("--n", type=int, default=25)
    s.add_argument("--out", help="directory for geometry.csv")
    s.set_defaults(func=cmd_geometry)

    s = sub.add_parser("earth-power", parents=[common], help="circular-orbit radiated power, SI")
    s.add_argument("--mass", type=float, default=EARTH_MASS_KG, help="kg")
    s.add_argument("--speed", type=float, default=ex.EARTH_SPEED_SI, help="m/s")
    s.add_argument("--radius", type=float, default=ex.EARTH_ORBIT_SI, help="m")
    s.set_defaults(func=cmd_earth_power)

    s = sub.add_parser("checks", parents=[common], help="remaining numerical checks")
    s.add_argument("which", nargs="*", choices=["kinetic", "pde", "integrator", "flux"])
    s.set_defaults(func=cmd_checks)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, ValidationError, RunError, GeometryError, RadiationError,
            FileNotFoundError, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
