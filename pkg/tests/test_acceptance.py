"""Acceptance suite: one test and one printed PASS/FAIL line per criterion.

Tolerances and runtime limits are pinned here and must not be loosened.
Run ``python tests/test_acceptance.py`` for the summary lines alone.
"""
import contextlib
import io
import re
import time

import pytest

from poincare_gravity import cli
from poincare_gravity import experiments as ex
from poincare_gravity.checks import run_suite

# (tolerance, runtime limit in s)
CRITERIA = {
    1: ("newton limit", 1e-6, 1.0),
    2: ("kinetic correction", 1e-2, 1.0),
    3: ("earth radiated power", 5e-2, 1.0),
    4: ("larmor-quadrature equivalence", 1e-8, 10.0),
    5: ("flux-power consistency", 1e-3, 60.0),
    6: ("weak equivalence principle", 1e-10, 10.0),
    7: ("clock rate", 1e-12, 1.0),
    8: ("algebra property suite", None, 30.0),
    9: ("pde residuals", 1e-6, 10.0),
    10: ("integrator health", 1e-9, 10.0),
}


def _line(n, passed, value, tol, seconds, limit, extra=""):
    name = CRITERIA[n][0]
    status = "PASS" if passed and seconds < limit else "FAIL"
    tol_s = f"{tol:.1e}" if tol is not None else "per-property"
    return (f"criterion {n:2d} {name}: {status} value={value:.3e} tol={tol_s} "
            f"runtime={seconds:.2f}s limit={limit:g}s{extra}")


def _emit(capsys, text):
    if capsys is None:
        print(text)
        return
    with capsys.disabled():
        print("\n" + text)


def crit1():
    c = ex.newton_check(masses=(1e-3, 1e-2, 1e-1, 1.0), radii=(10.0, 100.0, 1e3, 1e4), tol=CRITERIA[1][1])
    return c.passed, c.max_error, c.seconds, ""


def crit2():
    c = ex.kinetic_correction_check(tol=CRITERIA[2][1])
    dev = dict(c.details)["deviation"]
    # the deviation itself must sit at v^2/2 ~ 4.93e-9
    ok = c.passed and abs(dev - 4.93e-9) / 4.93e-9 < CRITERIA[2][1]
    return ok, c.max_error, c.seconds, f" deviation={dev:.4e}"


def crit3():
    t0 = time.perf_counter()
    buf = io.StringIO()
    with contextlib.redirect_stdout(buf):
        status = cli.main(["earth-power", "--mass", "5.972e24", "--speed", "2.978e4", "--radius", "1.496e11"])
    seconds = time.perf_counter() - t0
    m = re.search(r"\|P\| = ([0-9.eE+-]+) W", buf.getvalue())
    p = float(m.group(1)) if m else float("nan")
    err = abs(p - 5.2e8) / 5.2e8
    return status == 0 and err <= CRITERIA[3][1], err, seconds, f" |P|={p:.4e} W"


def crit4():
    c = ex.larmor_check(speeds=(0.0, 0.3, 0.6, 0.9), tol=CRITERIA[4][1])
    return c.passed and len(c.details) == 8, c.max_error, c.seconds, ""


def crit5():
    c = ex.flux_check(speed=0.3, orbit_radius=1.0, radius_factor=1e3, tol=CRITERIA[5][1])
    return c.passed, c.max_error, c.seconds, ""


def crit6():
    c = ex.wep_check(n_steps=1000, ratio=10.0, tol=CRITERIA[6][1])
    return c.passed, c.max_error, c.seconds, ""


def crit7():
    c = ex.clock_check(tol=CRITERIA[7][1])
    return c.passed, c.max_error, c.seconds, ""


def crit8():
    rep = run_suite(trials=10_000, seed=0, profile="default")
    worst = max(r.max_residual / r.tolerance for r in rep.results)
    detail = " " + "; ".join(f"{r.name}={r.max_residual:.1e}/{r.tolerance:.0e}" for r in rep.results)
    return rep.passed, worst, rep.seconds, detail


def crit9():
    c = ex.pde_check(n_events=100, tol=CRITERIA[9][1])
    return c.passed, c.max_error, c.seconds, ""


def crit10():
    c = ex.integrator_check(n_steps=10_000, tol=CRITERIA[10][1])
    return c.passed, c.max_error, c.seconds, ""


RUNNERS = {1: crit1, 2: crit2, 3: crit3, 4: crit4, 5: crit5, 6: crit6, 7: crit7, 8: crit8, 9: crit9, 10: crit10}


@pytest.mark.parametrize("n", sorted(RUNNERS))
def test_criterion(n, capsys):
    passed, value, seconds, extra = RUNNERS[n]()
    _, tol, limit = CRITERIA[n]
    _emit(capsys, _line(n, passed, value, tol, seconds, limit, extra))
    assert passed, f"criterion {n} value {value:.3e} outside tolerance"
    assert seconds < limit, f"criterion {n} took {seconds:.2f}s (limit {limit}s)"


if __name__ == "__main__":
    for n in sorted(RUNNERS):
        passed, value, seconds, extra = RUNNERS[n]()
        _emit(None, _line(n, passed, value, CRITERIA[n][1], seconds, CRITERIA[n][2], extra))
