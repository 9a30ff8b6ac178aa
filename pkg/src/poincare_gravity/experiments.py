"""Numerical experiments behind the CLI check commands and the acceptance tests.

Every function returns a :class:`Check` holding the worst relative (or
absolute) discrepancy found and the tolerance it was judged against.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .algebra import GaugeFieldConfiguration
from .constants import DEFAULT, Constants
from .dynamics import (IntegratorConfig, ParticleState, acceleration, coordinate_acceleration,
                       coupling_bracket, newton_accel, step)
from .geometry import static_metric_factor
from .radiation import (AngularGrid, Emitter, circular_orbit_power, flux_integral,
                        integrate_angular_power, total_power)
from .retarded import FieldProvider, SourceParticle, linearized_residual, retarded_time
from .units import EARTH_MASS_KG, SI
from .worldline import Worldline

EARTH_SPEED_SI = 2.978e4
EARTH_ORBIT_SI = 1.496e11


@dataclass
class Check:
    name: str
    max_error: float
    tolerance: float
    details: list = field(default_factory=list)
    seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return bool(self.max_error <= self.tolerance)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{self.name}: {status} max_error={self.max_error:.3e} tol={self.tolerance:.1e}"


def _timed(fn):
    def wrapper(*args, **kw):
        t0 = time.perf_counter()
        out = fn(*args, **kw)
        out.seconds = time.perf_counter() - t0
        return out
    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


@_timed
def newton_check(masses=(1e-3, 1e-2, 1e-1, 1.0), radii=(10.0, 100.0, 1e3, 1e4),
                 tol: float = 1e-6, const: Constants = DEFAULT) -> Check:
    """Initial coordinate acceleration of a test body at rest next to a static mass."""
    out = Check("newton", 0.0, tol)
    for m_A in masses:
        src = SourceParticle(m_A, Worldline.static(tau_range=(-1e6, 1e6)))
        prov = FieldProvider([src], const)
        for r in radii:
            body = ParticleState.at_rest((r, 0.0, 0.0), 1e-9 * m_A)
            acc = coordinate_acceleration(body.u, acceleration(body, prov.em(body.y), const))
            ref = newton_accel(m_A, body.y[1:], const.newton_gamma)
            err = float(np.linalg.norm(acc - ref) / np.linalg.norm(ref))
            out.details.append((m_A, r, float(acc[0]), float(ref[0]), err))
            out.max_error = max(out.max_error, err)
    return out


@_timed
def kinetic_correction_check(speed_si: float = EARTH_SPEED_SI, tol: float = 0.01) -> Check:
    """Relative deviation of the coupling bracket from its rest-mass value.

    Source at rest (P = m_A e_0, M = 0); test body with P = m_B u. The
    bracket deviation is compared with the energy oracle
    E_B / m_B - 1 = sqrt(1 + q^2/m_B^2) - 1 and both with v^2/2.
    """
    v = speed_si * SI.factor("velocity")
    m_A, m_B = 1.0, 1.0
    gamma = 1.0 / math.sqrt(1.0 - v * v)
    u = gamma * np.array([1.0, v, 0.0, 0.0])
    P = np.array([m_A, 0.0, 0.0, 0.0])
    zero = np.zeros((4, 4))
    moving = coupling_bracket(P, zero, m_B * u, zero)
    rest = coupling_bracket(P, zero, m_B * np.array([1.0, 0.0, 0.0, 0.0]), zero)
    deviation = moving / rest - 1.0
    q = m_B * gamma * v
    oracle = math.sqrt(m_B * m_B + q * q) / m_B - 1.0
    half_v2 = 0.5 * v * v
    err = max(abs(deviation - half_v2) / half_v2, abs(oracle - half_v2) / half_v2,
              abs(deviation - oracle) / oracle)
    return Check("kinetic-correction", err, tol,
                 [("deviation", deviation), ("energy_oracle", oracle), ("v2_over_2", half_v2)])


def earth_power_si(mass_kg: float = EARTH_MASS_KG, speed_si: float = EARTH_SPEED_SI,
                   radius_m: float = EARTH_ORBIT_SI) -> float:
    """Signed circular-orbit power in W for SI inputs."""
    m = mass_kg * SI.factor("mass")
    v = speed_si * SI.factor("velocity")
    rho = radius_m * SI.factor("length")
    return circular_orbit_power(m, v, rho).value / SI.factor("power")


@_timed
def earth_power_check(reference_w: float = 5.2e8, tol: float = 0.05, **kw) -> Check:
    p = earth_power_si(**kw)
    return Check("earth-power", abs(abs(p) - reference_w) / reference_w, tol, [("power_W", p)])


def _unit(v):
    v = np.asarray(v, dtype=float)
    return v / np.linalg.norm(v)


@_timed
def larmor_check(speeds=(0.0, 0.3, 0.6, 0.9), grid: AngularGrid = None, tol: float = 1e-8) -> Check:
    """Quadrature of the angular pattern against the closed-form total power."""
    grid = grid or AngularGrid.product()
    vdir = _unit([0.3, -0.5, 0.81])
    perp = _unit(np.cross(vdir, [0.2, 0.9, -0.1]))
    out = Check("larmor-quadrature", 0.0, tol)
    for s in speeds:
        for label, adir in (("perpendicular", perp), ("parallel", vdir)):
            em = Emitter.point_mass(1.0, s * vdir, 0.7 * adir)
            quad = integrate_angular_power(em, grid)
            ref = total_power(em)
            err = abs(quad - ref) / abs(ref)
            out.details.append((s, label, quad, ref, err))
            out.max_error = max(out.max_error, err)
    return out


@_timed
def flux_check(speed: float = 0.3, orbit_radius: float = 1.0, radius_factor: float = 1e3,
               grid: AngularGrid = None, tol: float = 1e-3) -> Check:
    """Wave-zone sphere flux of a circular orbit against the Larmor power at emission."""
    grid = grid or AngularGrid.product(32, 64)
    R = radius_factor * orbit_radius
    span = 1.2 * R
    wl = Worldline.circular(orbit_radius, speed, (-span, 0.05 * span), 20001)
    src = SourceParticle(1.0, wl, identification_mode="frozen")
    res = flux_integral(src, R, grid, t=0.0, mode="emission", estimate_error=False)
    ref = total_power(Emitter.at(src, res.emission_tau))
    return Check("flux-power", abs(res.value - ref) / abs(ref), tol, [("flux", res.value), ("larmor", ref)])


def _circular_start(m_A: float, r: float, mass: float) -> ParticleState:
    return ParticleState.moving((r, 0.0, 0.0), (0.0, math.sqrt(m_A / r), 0.0), mass)


@_timed
def wep_check(n_steps: int = 1000, mass: float = 1e-3, ratio: float = 10.0, r: float = 10.0,
              dtau: float = 0.05, tol: float = 1e-10) -> Check:
    """Same initial data, masses m and ratio*m, same static external field."""
    src = SourceParticle(1.0, Worldline.static(tau_range=(-1e5, 1e5)))
    prov = FieldProvider([src])
    cfg = IntegratorConfig(dtau=dtau)
    a, b = _circular_start(1.0, r, mass), _circular_start(1.0, r, ratio * mass)
    worst = 0.0
    for _ in range(n_steps):
        a = step(a, prov.em, cfg)
        b = step(b, prov.em, cfg)
        worst = max(worst, float(np.linalg.norm(a.y[1:] - b.y[1:]) / np.linalg.norm(a.y[1:])))
    return Check("wep", worst, tol, [("final_position", a.y[1:].tolist())])


@_timed
def clock_check(m_A: float = 1.0, ratios=None, tol: float = 1e-12) -> Check:
    """Line-element g_tt of a static clock against 1 - 2 m_A / r."""
    ratios = np.geomspace(10.0, 1e6, 25) if ratios is None else ratios
    out = Check("clock-rate", 0.0, tol)
    for k in ratios:
        r = float(k) * m_A
        g_tt = static_metric_factor(m_A, r)
        err = abs(g_tt - (1.0 - 2.0 * m_A / r))
        out.details.append((r, g_tt, err))
        out.max_error = max(out.max_error, err)
    return out


@_timed
def pde_check(n_events: int = 100, seed: int = 0, speed: float = 0.5, tol: float = 1e-6) -> Check:
    """Wave-operator residual of the retarded potentials at random off-worldline events.

    The residual is measured in units of (field scale)/r^2, where r is the
    distance to the retarded point; half the events use a static source
    and half a uniformly moving one.
    """
    rng = np.random.default_rng(seed)
    sources = [SourceParticle(1.0, Worldline.static(tau_range=(-200.0, 200.0))),
               SourceParticle(1.0, Worldline.uniform((speed, 0.0, 0.0), tau_range=(-200.0, 200.0)))]
    out = Check("pde-residual", 0.0, tol)
    for i in range(n_events):
        src = sources[i % 2]
        prov = FieldProvider([src])
        cfg = GaugeFieldConfiguration(prov.potential)
        d = rng.normal(size=3)
        x = np.concatenate([[rng.uniform(0.0, 5.0)], rng.uniform(1.0, 10.0) * d / np.linalg.norm(d)])
        r = retarded_time(x, src.worldline).r
        A = prov.potential(x)
        scale = max(np.abs(A.a).max(), np.abs(A.b).max())
        ra, rb = linearized_residual(cfg, x, src)
        err = max(np.abs(ra).max(), np.abs(rb).max()) * r * r / scale
        out.max_error = max(out.max_error, float(err))
    return out


@_timed
def integrator_check(n_steps: int = 10_000, r: float = 10.0, dtau: float = 0.05,
                     tol: float = 1e-9) -> Check:
    """|u.u + 1| drift of plain RK4 (no renormalization) on a circular orbit."""
    src = SourceParticle(1.0, Worldline.static(tau_range=(-1e6, 1e6)))
    prov = FieldProvider([src])
    cfg = IntegratorConfig(method="rk4", dtau=dtau, renormalize_u=False)
    st = _circular_start(1.0, r, 1e-3)
    worst = 0.0
    for _ in range(n_steps):
        st = step(st, prov.em, cfg)
        worst = max(worst, st.norm_residual)
    return Check("integrator-health", worst, tol, [("final_radius", float(np.linalg.norm(st.y[1:])))])
