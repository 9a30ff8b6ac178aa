"""Scenario files, unit handling at the boundary and the simulation runner.

Scenario files are TOML with a versioned ``schema`` key; see
``docs/scenario_schema.md`` for the full key list. Everything is
converted to geometrized units on load and back to the input unit
system on output.
"""
from __future__ import annotations

import csv
import hashlib
import json
import math
import platform
import re
import sys
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional

import numpy as np
import scipy

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover
    import tomli as tomllib

from . import __version__
from .checks import TOLERANCE_PROFILES, run_suite
from .constants import DEFAULT, G_NEWTON_LIMIT, Constants, mdot
from .dynamics import IntegratorConfig, ParticleState, acceleration, step
from .geometry import GeometryError, clock_rate, static_metric_factor
from .radiation import AngularGrid, Emitter, RadiationError, angular_power, total_power
from .retarded import EMDecomposition, FieldProvider, RetardedError, SourceParticle
from .units import SI
from .worldline import Worldline, WorldlineBuilder

SCHEMA_VERSION = 1
ROLES = ("source", "test", "both")
OUTPUT_KINDS = ("trajectory", "fields-on-grid", "radiation", "geometry", "checks")


class ParseError(ValueError):
    def __init__(self, msg: str, path=None, line: Optional[int] = None, field: Optional[str] = None):
        where = str(path) if path else "<scenario>"
        if line is not None:
            where += f":{line}"
        if field:
            where += f" [{field}]"
        super().__init__(f"{where}: {msg}")
        self.line = line
        self.field = field


class ValidationError(ValueError):
    def __init__(self, invariant: str, msg: str):
        super().__init__(f"{invariant}: {msg}")
        self.invariant = invariant


class RunError(RuntimeError):
    def __init__(self, check: str, msg: str):
        super().__init__(f"{check}: {msg}")
        self.check = check


@dataclass
class ParticleSpec:
    name: str
    mass: float
    position: tuple
    velocity: tuple = (0.0, 0.0, 0.0)
    identification_mode: str = "dynamic"
    role: str = "both"


@dataclass
class OutputSpec:
    kind: str
    path: str
    stride: int = 1
    options: dict = field(default_factory=dict)


@dataclass
class Scenario:
    name: str
    unit_system: str
    particles: list
    dt: float
    duration: float
    outputs: list
    integrator: IntegratorConfig = field(default_factory=IntegratorConfig)
    constants: Constants = DEFAULT
    origin: Optional[tuple] = None
    schema: int = SCHEMA_VERSION
    source_path: Optional[str] = None
    defaults_used: list = field(default_factory=list)

    def echo(self) -> dict:
        """Flat view of every setting the run uses, defaults included."""
        out = {
            "schema": self.schema,
            "name": self.name,
            "unit_system": self.unit_system,
            "duration": self.duration,
            "dt": self.dt,
            "origin": "barycenter" if self.origin is None else list(self.origin),
            "constants.newton_gamma": self.constants.newton_gamma,
            "constants.g": self.constants.g,
        }
        for k, v in asdict(self.integrator).items():
            out[f"integrator.{k}"] = v
        for i, p in enumerate(self.particles):
            for k, v in asdict(p).items():
                out[f"particles.{i}.{k}"] = list(v) if isinstance(v, tuple) else v
        for i, o in enumerate(self.outputs):
            out[f"outputs.{i}.kind"] = o.kind
            out[f"outputs.{i}.path"] = o.path
            out[f"outputs.{i}.stride"] = o.stride
            for k in sorted(o.options):
                out[f"outputs.{i}.{k}"] = o.options[k]
        return out

    def config_hash(self) -> str:
        blob = json.dumps(self.echo(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()


# loading -----------------------------------------------------------------------

_TOP_KEYS = {"schema", "name", "units", "duration", "constants", "integrator", "origin",
             "particles", "outputs"}
_PARTICLE_KEYS = {"name", "mass", "position", "velocity", "identification", "role"}
_INTEGRATOR_KEYS = {"method", "dt", "tol_u", "renormalize_u", "atol", "rtol", "max_halvings"}
_OUTPUT_KEYS = {"kind", "path", "stride"}


def _number(v, where, path):
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ParseError(f"expected a number, got {v!r}", path, field=where)
    return float(v)


def _vec3(v, where, path):
    if not isinstance(v, list) or len(v) != 3:
        raise ParseError("expected a list of 3 numbers", path, field=where)
    return tuple(_number(x, where, path) for x in v)


def _unknown(table, allowed, where, path):
    extra = sorted(set(table) - allowed)
    if extra:
        raise ParseError(f"unknown key(s) {', '.join(extra)}", path, field=where)


def parse_scenario(text: str, path=None) -> Scenario:
    try:
        raw = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        m = re.search(r"line (\d+)", str(exc))
        raise ParseError(str(exc), path, line=int(m.group(1)) if m else None) from None
    defaults = []

    def get(table, key, default, where):
        if key in table:
            return table[key]
        defaults.append(where)
        return default

    _unknown(raw, _TOP_KEYS, "<top>", path)
    schema = raw.get("schema")
    if schema != SCHEMA_VERSION:
        raise ParseError(f"unsupported schema {schema!r} (expected {SCHEMA_VERSION})", path, field="schema")
    name = str(get(raw, "name", Path(path).stem if path else "scenario", "name"))
    units = get(raw, "units", "geometrized", "units")
    if units not in ("geometrized", "SI"):
        raise ParseError(f"units must be 'geometrized' or 'SI', got {units!r}", path, field="units")
    if "duration" not in raw:
        raise ParseError("missing required key", path, field="duration")
    duration = _number(raw["duration"], "duration", path)

    const_t = raw.get("constants", {})
    _unknown(const_t, {"newton_gamma", "g"}, "constants", path)
    constants = Constants(
        newton_gamma=_number(get(const_t, "newton_gamma", 1.0, "constants.newton_gamma"),
                             "constants.newton_gamma", path),
        g=_number(get(const_t, "g", G_NEWTON_LIMIT, "constants.g"), "constants.g", path))

    integ = raw.get("integrator", {})
    _unknown(integ, _INTEGRATOR_KEYS, "integrator", path)
    if "dt" not in integ:
        raise ParseError("missing required key", path, field="integrator.dt")
    dt = _number(integ["dt"], "integrator.dt", path)
    base = IntegratorConfig()
    try:
        icfg = IntegratorConfig(
            dtau=1.0,  # per-step proper-time step is set from dt by the runner
            tol_u=_number(get(integ, "tol_u", base.tol_u, "integrator.tol_u"), "integrator.tol_u", path),
            method=str(get(integ, "method", base.method, "integrator.method")),
            renormalize_u=bool(get(integ, "renormalize_u", base.renormalize_u, "integrator.renormalize_u")),
            atol=_number(get(integ, "atol", base.atol, "integrator.atol"), "integrator.atol", path),
            rtol=_number(get(integ, "rtol", base.rtol, "integrator.rtol"), "integrator.rtol", path),
            max_halvings=int(get(integ, "max_halvings", base.max_halvings, "integrator.max_halvings")),
        )
    except ValueError as exc:
        raise ValidationError("integrator settings", str(exc)) from None

    origin = raw.get("origin")
    if origin is None:
        defaults.append("origin")
    elif origin != "barycenter":
        origin = _vec3(origin, "origin", path)
    else:
        origin = None

    plist = raw.get("particles", [])
    if not isinstance(plist, list):
        raise ParseError("particles must be an array of tables", path, field="particles")
    particles = []
    for i, p in enumerate(plist):
        where = f"particles.{i}"
        _unknown(p, _PARTICLE_KEYS, where, path)
        for req in ("mass", "position"):
            if req not in p:
                raise ParseError("missing required key", path, field=f"{where}.{req}")
        particles.append(ParticleSpec(
            name=str(get(p, "name", f"p{i}", f"{where}.name")),
            mass=_number(p["mass"], f"{where}.mass", path),
            position=_vec3(p["position"], f"{where}.position", path),
            velocity=_vec3(get(p, "velocity", [0.0, 0.0, 0.0], f"{where}.velocity"), f"{where}.velocity", path),
            identification_mode=str(get(p, "identification", "dynamic", f"{where}.identification")),
            role=str(get(p, "role", "both", f"{where}.role")),
        ))

    olist = raw.get("outputs", [])
    outputs = []
    for i, o in enumerate(olist):
        where = f"outputs.{i}"
        if "kind" not in o:
            raise ParseError("missing required key", path, field=f"{where}.kind")
        kind = o["kind"]
        opts = {k: v for k, v in o.items() if k not in _OUTPUT_KEYS}
        outputs.append(OutputSpec(kind=kind,
                                  path=str(get(o, "path", f"{kind}.csv", f"{where}.path")),
                                  stride=int(get(o, "stride", 1, f"{where}.stride")),
                                  options=opts))

    scn = Scenario(name=name, unit_system=units, particles=particles, dt=dt, duration=duration,
                   outputs=outputs, integrator=icfg, constants=constants, origin=origin,
                   schema=schema, source_path=str(path) if path else None, defaults_used=defaults)
    validate(scn)
    return scn


def load_scenario(path) -> Scenario:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ParseError(f"cannot read scenario: {exc.strerror}", p) from None
    return parse_scenario(text, p)


def validate(scn: Scenario) -> None:
    if not scn.particles:
        raise ValidationError("at least one particle", "scenario defines no particles")
    if not scn.duration > 0:
        raise ValidationError("duration > 0", f"duration is {scn.duration}")
    if not scn.dt > 0:
        raise ValidationError("dt > 0", f"dt is {scn.dt}")
    names = [p.name for p in scn.particles]
    if len(set(names)) != len(names):
        raise ValidationError("unique particle names", f"duplicate names in {names}")
    c = 1.0 if scn.unit_system == "geometrized" else SI.c_si
    for p in scn.particles:
        if not p.mass > 0:
            raise ValidationError("mass > 0", f"particle {p.name!r} has mass {p.mass}")
        speed = math.sqrt(sum(v * v for v in p.velocity)) / c
        if not speed < 1.0:
            raise ValidationError("all speeds < 1 after conversion",
                                  f"particle {p.name!r} has speed {speed:.6g} c")
        if p.role not in ROLES:
            raise ValidationError("role in source|test|both", f"particle {p.name!r} has role {p.role!r}")
        if p.identification_mode not in ("dynamic", "frozen"):
            raise ValidationError("identification in dynamic|frozen",
                                  f"particle {p.name!r} has identification {p.identification_mode!r}")
    for o in scn.outputs:
        if o.kind not in OUTPUT_KINDS:
            raise ValidationError("known output kind", f"{o.kind!r} is not one of {', '.join(OUTPUT_KINDS)}")
        if o.stride < 1:
            raise ValidationError("output stride >= 1", f"{o.kind} stride is {o.stride}")
    # staggered stepping reads other histories up to the previous step only
    movers_emit = [p for p in scn.particles if p.role == "both"]
    if movers_emit and len(scn.particles) > 1:
        sep = min(math.dist(a.position, b.position)
                  for i, a in enumerate(scn.particles) for b in scn.particles[i + 1:])
        light = sep / c
        if not scn.dt < 0.5 * light:
            raise ValidationError("dt below half the light-crossing time",
                                  f"dt={scn.dt:g} but closest pair is {light:g} light-time apart")


# geometrized view ---------------------------------------------------------------

@dataclass
class _Body:
    spec: ParticleSpec
    mass: float
    position: np.ndarray
    velocity: np.ndarray


def _to_geometrized(scn: Scenario):
    if scn.unit_system == "geometrized":
        L = T = M = V = 1.0
    else:
        L, T = 1.0, SI.factor("time")
        M, V = SI.factor("mass"), SI.factor("velocity")
    bodies = [_Body(p, p.mass * M, np.array(p.position) * L, np.array(p.velocity) * V) for p in scn.particles]
    if scn.origin is None:
        mt = sum(b.mass for b in bodies)
        origin = sum(b.mass * b.position for b in bodies) / mt
    else:
        origin = np.array(scn.origin) * L
    return bodies, scn.dt * T, scn.duration * T, np.concatenate([[0.0], origin])


# simulation ---------------------------------------------------------------------

@dataclass
class SimulationResult:
    histories: dict          # name -> Worldline
    bodies: list
    origin: np.ndarray
    duration: float          # geometrized
    dt: float
    max_norm_residual: float
    steps: int


def simulate(scn: Scenario, profile: str = "default") -> SimulationResult:
    """Advance every test/both particle on the shared coordinate-time grid.

    Before t = 0 every particle is taken to move uniformly with its
    initial velocity. Each step, a mover sees frozen snapshots of the
    other emitters' histories as they stood before the step; pure
    sources move uniformly throughout.
    """
    bodies, dt, duration, origin = _to_geometrized(scn)
    const = scn.constants
    extent = max(float(np.linalg.norm(b.position - origin[1:])) for b in bodies)
    speed_max = max(float(np.linalg.norm(b.velocity)) for b in bodies)
    t_past = 4.0 * extent + 10.0 * dt + 1.0
    t_future = duration + 2.0 * dt + t_past + speed_max * duration

    states, builders, fixed = {}, {}, {}
    for b in bodies:
        v = b.velocity
        gamma = 1.0 / math.sqrt(1.0 - v @ v)
        if b.spec.role == "source":
            fixed[b.spec.name] = Worldline.uniform(v, b.position, (-t_past / gamma, t_future / gamma), 3)
            continue
        past = Worldline.uniform(v, b.position, (-t_past / gamma, 0.0), 3)
        wb = WorldlineBuilder(max(16, int(duration / dt) + 8))
        wb.extend(past)
        builders[b.spec.name] = wb
        st = ParticleState.moving(b.position, v, b.mass, 0.0,
                                  identification_mode=b.spec.identification_mode, origin=origin)
        states[b.spec.name] = st

    def sources_for(name):
        out = []
        for b in bodies:
            nm = b.spec.name
            if nm == name or b.spec.role == "test":
                continue
            w = fixed[nm] if nm in fixed else builders[nm].snapshot()
            out.append(SourceParticle(b.mass, w, identification_mode=b.spec.identification_mode,
                                      origin=origin))
        return out

    cfg = scn.integrator
    n_steps = int(math.ceil(duration / dt - 1e-9))
    worst = max((s.norm_residual for s in states.values()), default=0.0)
    for k in range(n_steps):
        providers = {nm: FieldProvider(sources_for(nm), const) for nm in states}
        for nm in states:  # fixed order: file order of the particles
            st = states[nm]
            prov = providers[nm]
            if prov.sources:
                fields = lambda x, prov=prov: prov.em(x)  # noqa: E731
            else:
                fields = _no_field
            try:
                new = step(st, fields, cfg, const, dtau=dt / st.u[0])
                du = acceleration(new, fields(new.y), const)
            except RetardedError as exc:
                raise RunError("retarded-time solve", f"particle {nm!r}, step {k}: {exc}") from None
            builders[nm].append(new.tau, new.y, new.u, du)
            states[nm] = new
            worst = max(worst, new.norm_residual)
    limit = cfg.tol_u if profile == "default" else 0.1 * cfg.tol_u
    if not cfg.renormalize_u and worst > limit:
        raise RunError("integrator health", f"|u.u + 1| reached {worst:.3e} > {limit:.1e}")
    hist = dict(fixed)
    for nm, wb in builders.items():
        w = wb.snapshot()
        hist[nm] = Worldline(w.tau.copy(), w.y.copy(), w.u.copy(), w.du.copy(), check=False)
    return SimulationResult(hist, bodies, origin, duration, dt, worst, n_steps)


def _no_field(x):
    return EMDecomposition.zero()


# outputs ------------------------------------------------------------------------

def has_rotational_coupling(scn: Scenario) -> bool:
    """True when some source and some moving particle both carry rotational charge at t = 0."""
    bodies, _, _, origin = _to_geometrized(scn)

    def m_nonzero(b):
        v = b.velocity
        gamma = 1.0 / math.sqrt(1.0 - v @ v)
        u = gamma * np.concatenate([[1.0], v])
        y = np.concatenate([[0.0], b.position]) - origin
        return bool(np.any(np.outer(y, u) - np.outer(u, y)))

    src = any(m_nonzero(b) for b in bodies if b.spec.role != "test")
    mov = any(m_nonzero(b) for b in bodies if b.spec.role != "source")
    return src and mov


def _fmt(v) -> str:
    return repr(float(v))


def write_csv(path: Path, header, rows, trailer: Optional[str] = None) -> None:
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh, lineterminator="\n")
        wr.writerow(header)
        for row in rows:
            wr.writerow([v if isinstance(v, str) else _fmt(v) for v in row])
        if trailer is not None:
            fh.write(trailer + "\n")


def _out_scale(scn: Scenario):
    """(time, length) factors from geometrized back to the scenario's units."""
    if scn.unit_system == "SI":
        return 1.0 / SI.factor("time"), 1.0
    return 1.0, 1.0


def _trajectory_rows(scn, sim, stride):
    ts, ls = _out_scale(scn)
    rows = []
    times = np.arange(0, sim.steps + 1, stride) * sim.dt
    for b in sim.bodies:
        w = sim.histories[b.spec.name]
        t_end = min(float(w.y[-1, 0]), sim.duration)
        for t in times:
            if t > t_end * (1 + 1e-12):
                break
            tau, y, u, _ = w.at_coordinate_time(t)
            rows.append([b.spec.name, t * ts, tau * ts, *(y[1:] * ls), *u, abs(mdot(u, u) + 1.0)])
    return rows


def _emitter_spec(scn, sim, opts):
    name = opts.get("particle")
    candidates = [b for b in sim.bodies if b.spec.role != "source"] or sim.bodies
    if name is not None:
        candidates = [b for b in sim.bodies if b.spec.name == name]
        if not candidates:
            raise RunError("radiation output", f"no particle named {name!r}")
    return candidates[0]


def _radiation(scn, sim, opts):
    b = _emitter_spec(scn, sim, opts)
    w = sim.histories[b.spec.name]
    t = min(sim.duration, float(w.y[-1, 0]))
    tau, y, u, du = w.at_coordinate_time(t)
    src = SourceParticle(b.mass, w, identification_mode=b.spec.identification_mode, origin=sim.origin)
    em = Emitter.at(src, tau)
    bracket = opts.get("bracket", "full")
    if bracket == "translation":
        # leading order in the rest mass: drop the rotational charge from the bracket
        em = Emitter(em.P, np.zeros((4, 4)), em.v, em.a)
    elif bracket != "full":
        raise RunError("radiation output", f"bracket must be 'full' or 'translation', not {bracket!r}")
    grid = AngularGrid.product(int(opts.get("n_theta", 64)), int(opts.get("n_phi", 128)))
    scale = 1.0 / SI.factor("power") if scn.unit_system == "SI" else 1.0
    return radiation_table(em, grid, scn.constants, scale)


def radiation_table(em: Emitter, grid: AngularGrid, const: Constants = DEFAULT, scale: float = 1.0):
    """Rows (theta, phi, dP/dOmega), trailer line and totals; ``scale`` converts the power unit."""
    vals = scale * angular_power(em, grid.nodes, const)
    quad = grid.integrate(vals)
    larmor = scale * total_power(em, const)
    rel = abs(quad - larmor) / abs(larmor) if larmor != 0 else abs(quad)
    rows = [[th, ph, v] for th, ph, v in zip(grid.theta, grid.phi, vals)]
    trailer = f"# quadrature_total={_fmt(quad)},larmor={_fmt(larmor)},relative_difference={_fmt(rel)}"
    return rows, trailer, quad, larmor, rel


GEOMETRY_HEADER = ["r", "g_tt", "clock_rate", "gr_g_tt", "gr_weak_clock_rate", "g_tt_abs_diff"]


def geometry_rows(m_A: float, radii, newton_gamma: float = 1.0):
    rows = []
    for r in radii:
        g = static_metric_factor(m_A, r, newton_gamma)
        gr = 1.0 - 2.0 * newton_gamma * m_A / r
        rows.append([r, g, clock_rate(m_A, r, newton_gamma), gr, 1.0 - newton_gamma * m_A / r, abs(g - gr)])
    return rows


def _geometry(scn, sim, opts):
    srcs = [b for b in sim.bodies if b.spec.role != "test"] or sim.bodies
    m = srcs[0].mass
    gm = scn.constants.newton_gamma * m
    r_lo = float(opts.get("r_min", 10.0)) * gm
    r_hi = float(opts.get("r_max", 1000.0)) * gm
    n = int(opts.get("n", 50))
    radii = np.geomspace(r_lo, r_hi, n)
    # geometrized lengths are metres, so SI scenarios need no conversion here
    return geometry_rows(m, radii, scn.constants.newton_gamma)


def _fields_on_grid(scn, sim, opts):
    ext = float(opts.get("extent", 2.0))
    n = int(opts.get("n", 11))
    srcs = [SourceParticle(b.mass, sim.histories[b.spec.name], identification_mode=b.spec.identification_mode,
                           origin=sim.origin) for b in sim.bodies if b.spec.role != "test"]
    prov = FieldProvider(srcs, scn.constants)
    t = sim.duration
    rows = []
    ax = np.linspace(-ext, ext, n)
    for xv in ax:
        for yv in ax:
            x = np.array([t, xv, yv, 0.0]) + np.concatenate([[0.0], sim.origin[1:]])
            try:
                em = prov.em(x)
                d, h = em.d[:, 0], em.h[:, 0]
            except RetardedError:
                d = h = np.full(3, np.nan)
            rows.append([x[1], x[2], x[3], *d, *h])
    return rows


def run(scn: Scenario, out_dir, profile: str = "default", seed: int = 0,
        timestamp: Optional[str] = None) -> dict:
    """Execute a scenario and write its outputs plus ``manifest.txt``.

    Returns the manifest as a dict. Module errors propagate as
    :class:`RunError` after a manifest with ``status=failed`` is written.
    """
    if profile not in TOLERANCE_PROFILES:
        raise ValueError(f"unknown tolerance profile {profile!r}")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    manifest = {
        "schema": str(scn.schema),
        "name": scn.name,
        "scenario_path": scn.source_path or "",
        "config_sha256": scn.config_hash(),
        "tolerance_profile": profile,
        "seed": str(seed),
        "tolerance.exact": _fmt(TOLERANCE_PROFILES[profile]["exact"]),
        "tolerance.fd": _fmt(TOLERANCE_PROFILES[profile]["fd"]),
        "output_units": "SI" if scn.unit_system == "SI" else "geometrized",
    }
    for k, v in scn.echo().items():
        manifest[f"config.{k}"] = json.dumps(v) if isinstance(v, (list, dict)) else str(v)
    manifest["defaults_used"] = ",".join(scn.defaults_used)
    manifest.update({
        "version.package": __version__,
        "version.python": platform.python_version(),
        "version.numpy": np.__version__,
        "version.scipy": scipy.__version__,
        "timestamp": timestamp or datetime.now(timezone.utc).isoformat(timespec="seconds"),
    })
    try:
        if has_rotational_coupling(scn):
            manifest["experimental"] = "nonzero M.N coupling between a source and a moving particle"
        needs_sim = any(o.kind != "checks" for o in scn.outputs) or not scn.outputs
        sim = simulate(scn, profile) if needs_sim else None
        if sim is not None:
            manifest["check.norm_residual_max"] = _fmt(sim.max_norm_residual)
            manifest["steps"] = str(sim.steps)
        for i, o in enumerate(scn.outputs):
            path = out / o.path
            if o.kind == "trajectory":
                write_csv(path, ["particle", "t", "tau", "y1", "y2", "y3", "u0", "u1", "u2", "u3",
                                 "norm_residual"], _trajectory_rows(scn, sim, o.stride))
            elif o.kind == "radiation":
                rows, trailer, *_ = _radiation(scn, sim, o.options)
                write_csv(path, ["theta", "phi", "dP_dOmega"], rows, trailer)
            elif o.kind == "geometry":
                write_csv(path, GEOMETRY_HEADER, _geometry(scn, sim, o.options))
            elif o.kind == "fields-on-grid":
                write_csv(path, ["x", "y", "z", "d1", "d2", "d3", "h1", "h2", "h3"],
                          _fields_on_grid(scn, sim, o.options))
            elif o.kind == "checks":
                rep = run_suite(int(o.options.get("trials", 1000)), seed, profile)
                write_csv(path, ["property", "trials", "max_residual", "tolerance", "status"],
                          [[r.name, str(r.trials), r.max_residual, r.tolerance,
                            "PASS" if r.passed else "FAIL"] for r in rep.results])
                if not rep.passed:
                    bad = [r.name for r in rep.results if not r.passed]
                    raise RunError("algebra property suite", f"failed: {', '.join(bad)}")
            manifest[f"output.{i}.{o.kind}"] = o.path
        manifest["status"] = "ok"
    except (RunError, GeometryError, RadiationError, ValueError) as exc:
        manifest["status"] = "failed"
        manifest["error"] = str(exc)
        write_manifest(out / "manifest.txt", manifest)
        if isinstance(exc, RunError):
            raise
        raise RunError(type(exc).__name__, str(exc)) from None
    write_manifest(out / "manifest.txt", manifest)
    return manifest


def write_manifest(path: Path, manifest: dict) -> None:
    with open(path, "w", newline="") as fh:
        for k, v in manifest.items():
            fh.write(f"{k}={v}\n")


def read_manifest(path) -> dict:
    out = {}
    for line in Path(path).read_text().splitlines():
        if line and "=" in line:
            k, v = line.split("=", 1)
            out[k] = v
    return out


def template_path(name: str) -> Path:
    """Path of a scenario template shipped with the package."""
    p = Path(__file__).with_name("scenarios") / f"{name}.toml"
    if not p.exists():
        raise FileNotFoundError(f"no shipped scenario named {name!r}")
    return p
