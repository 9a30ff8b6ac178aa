"""Leading-order retarded Poincare fields of point sources.

Potentials are the g-free leading coefficients a^(0), b^(0); the field
strengths returned by :func:`field_strengths_at` carry one power of the
coupling g, i.e. they are the strengths of the physical field g a^(0).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import brentq

from .algebra import (AntisymTensor, FieldStrengths, GaugeFieldConfiguration, PoincareGaugeField,
                      field_strengths, strengths_from_em)
from .constants import DEFAULT, ETA, SIG, Constants, cross3, mdot
from .worldline import Worldline

FOUR_PI = 4.0 * math.pi
EIGHT_PI = 8.0 * math.pi


class RetardedError(RuntimeError):
    pass


class NotCovered(RetardedError):
    """The sampled history does not reach back to the past light cone."""


class Singular(RetardedError):
    """Field point too close to the worldline."""


@dataclass(frozen=True)
class RetardedPoint:
    tau_plus: float
    y_plus: np.ndarray
    u_plus: np.ndarray
    du_plus: np.ndarray
    r_vec: np.ndarray
    r: float
    v_hat: np.ndarray

    @property
    def accel_hat(self) -> np.ndarray:
        """Coordinate 3-acceleration dv/dt at the retarded point."""
        u0 = self.u_plus[0]
        return (self.du_plus[1:] - self.v_hat * self.du_plus[0]) / (u0 * u0)


def retarded_time(x, w: Worldline, *, tol: float = 1e-12, r_min: float = 1e-6,
                  method: str = "newton", polish: bool = True) -> RetardedPoint:
    """Intersection of the past light cone of ``x`` with the worldline.

    The bracket comes from a binary search over samples of
    phi(tau) = (x^0 - y^0) - |x - y|, which is strictly decreasing along
    any timelike worldline; the root is refined on the Hermite
    interpolant to ``tol`` ("newton": Newton safeguarded by bisection,
    "brentq" or "bisect") and polished with one Newton step on (x - y)^2.
    """
    x = np.asarray(x, dtype=float)
    x0, x1, x2, x3 = (float(v) for v in x)
    Y = w.y

    def phi_k(k):
        d = Y[k]
        return (x0 - d[0]) - math.sqrt((x1 - d[1]) ** 2 + (x2 - d[2]) ** 2 + (x3 - d[3]) ** 2)

    n = len(w)
    if phi_k(0) <= 0.0:
        raise NotCovered(f"worldline history starts at t={Y[0, 0]:.6g}, after the retarded time of x")
    if phi_k(n - 1) > 0.0:
        raise NotCovered(f"worldline ends at t={Y[-1, 0]:.6g}, before reaching the light cone of x")
    lo, hi = 0, n - 1
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if phi_k(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    k = lo
    c = w.position_coeffs(k)
    c0, c1, c2, c3 = ([float(v) for v in row] for row in c)

    def phi(s):
        y = [c0[i] + s * (c1[i] + s * (c2[i] + s * c3[i])) for i in range(4)]
        return (x0 - y[0]) - math.sqrt((x1 - y[1]) ** 2 + (x2 - y[2]) ** 2 + (x3 - y[3]) ** 2)

    if method == "newton":
        a, b = 0.0, 1.0
        s = 0.5
        for _ in range(100):
            y = [c0[i] + s * (c1[i] + s * (c2[i] + s * c3[i])) for i in range(4)]
            dy = [c1[i] + s * (2.0 * c2[i] + 3.0 * s * c3[i]) for i in range(4)]
            R1, R2, R3 = x1 - y[1], x2 - y[2], x3 - y[3]
            rr = math.sqrt(R1 * R1 + R2 * R2 + R3 * R3)
            f = (x0 - y[0]) - rr
            if f > 0.0:
                a = s
            else:
                b = s
            df = -dy[0] + (R1 * dy[1] + R2 * dy[2] + R3 * dy[3]) / rr if rr > 0.0 else -dy[0]
            s_new = s - f / df if df < 0.0 else 0.5 * (a + b)
            if not a <= s_new <= b:
                s_new = 0.5 * (a + b)
            if abs(s_new - s) <= tol or b - a <= tol:
                s = s_new
                break
            s = s_new
    elif method == "brentq":
        s = brentq(phi, 0.0, 1.0, xtol=tol, rtol=4 * np.finfo(float).eps, maxiter=200)
    elif method == "bisect":
        a, b = 0.0, 1.0
        while b - a > tol:
            m = 0.5 * (a + b)
            if phi(m) > 0.0:
                a = m
            else:
                b = m
        s = 0.5 * (a + b)
    else:
        raise ValueError(f"unknown root method {method!r}")

    tau = w.tau[k] + s * (w.tau[k + 1] - w.tau[k])
    y, u, du = w.state(tau)
    if polish:
        R = x - y
        sig = mdot(R, R)
        slope = -2.0 * mdot(u, R)
        if slope > 0.0:
            tau_new = tau - sig / slope
            if w.tau[k] <= tau_new <= w.tau[k + 1]:
                # the correction is at round-off level: a first-order update is exact enough
                dt = tau_new - tau
                tau = tau_new
                y, u = y + dt * u, u + dt * du
    r_vec = x[1:] - y[1:]
    r = float(math.sqrt(r_vec @ r_vec))
    if r < r_min:
        raise Singular(f"field point within r_min={r_min:g} of the worldline (r={r:.3g})")
    return RetardedPoint(tau, y, u, du, r_vec, r, u[1:] / u[0])


@dataclass
class SourceParticle:
    """Point source carrying gravitational charges P^a and M^{ab}.

    In ``dynamic`` mode the charges follow the inertial state,
    P = m u and M = m (y u - u y) with y measured from ``origin``. In
    ``frozen`` mode they are the supplied values, or the dynamic values
    at tau = 0 when none are supplied.
    """

    mass: float
    worldline: Worldline
    p_grav: Optional[np.ndarray] = None
    m_grav: Optional[AntisymTensor] = None
    identification_mode: str = "dynamic"
    origin: np.ndarray = field(default_factory=lambda: np.zeros(4))

    def __post_init__(self):
        if not self.mass > 0:
            raise ValueError("mass must be positive")
        if self.identification_mode not in ("dynamic", "frozen"):
            raise ValueError(f"identification_mode must be 'dynamic' or 'frozen', not {self.identification_mode!r}")
        self.origin = np.asarray(self.origin, dtype=float)
        if self.identification_mode == "frozen":
            if self.p_grav is None or self.m_grav is None:
                lo, hi = self.worldline.tau_range
                y, u, _ = self.worldline.state(min(max(0.0, lo), hi))
                P, M = identified_charges(self.mass, y - self.origin, u)
                if self.p_grav is None:
                    self.p_grav = P
                if self.m_grav is None:
                    self.m_grav = AntisymTensor.from_matrix(M)
            self.p_grav = np.asarray(self.p_grav, dtype=float)

    def charges(self, y, u) -> tuple[np.ndarray, np.ndarray]:
        """(P^a, M^{ab} as 4x4 matrix) for the state (y, u)."""
        if self.identification_mode == "dynamic":
            return identified_charges(self.mass, np.asarray(y) - self.origin, np.asarray(u))
        return self.p_grav, self.m_grav.matrix()


def identified_charges(mass: float, y, u) -> tuple[np.ndarray, np.ndarray]:
    y = np.asarray(y, dtype=float)
    u = np.asarray(u, dtype=float)
    yu = y[:, None] * u
    return mass * u, mass * (yu - yu.T)


@dataclass(frozen=True)
class EMDecomposition:
    """Poincare-electric/magnetic 3-vectors.

    d[i, a], h[i, a] for the translation strengths; d_rot[i, a, b],
    h_rot[i, a, b] for the rotational ones (inner indices upper).
    """

    d: np.ndarray
    h: np.ndarray
    d_rot: np.ndarray
    h_rot: np.ndarray

    @classmethod
    def zero(cls) -> EMDecomposition:
        return cls(np.zeros((3, 4)), np.zeros((3, 4)), np.zeros((3, 4, 4)), np.zeros((3, 4, 4)))

    def __add__(self, other: EMDecomposition) -> EMDecomposition:
        return EMDecomposition(self.d + other.d, self.h + other.h,
                               self.d_rot + other.d_rot, self.h_rot + other.h_rot)

    def to_strengths(self) -> FieldStrengths:
        return FieldStrengths(strengths_from_em(self.d, self.h), strengths_from_em(self.d_rot, self.h_rot))


def lienard_wiechert(x, s: SourceParticle, const: Constants = DEFAULT,
                     rp: Optional[RetardedPoint] = None, **kw) -> PoincareGaugeField:
    """Leading-order potentials a^(0)_m^a, b^(0)_m^{ab} at event x.

    a_m = -(lam^2 / 4 pi) P u_m / (u . (x - y+)),
    b_m = +(lam / 8 pi) M u_m / (u . (x - y+)),
    which is the sign fixed by the explicit static forms
    (a_0 = -lam^2 P / (4 pi r) at rest).
    """
    x = np.asarray(x, dtype=float)
    if rp is None:
        rp = retarded_time(x, s.worldline, **kw)
    P, M = s.charges(rp.y_plus, rp.u_plus)
    R = x - rp.y_plus
    uR = mdot(rp.u_plus, R)
    u_low = SIG * rp.u_plus
    lam = const.lam
    a = -(lam * lam / FOUR_PI) * np.outer(u_low, P) / uR
    b = (lam / EIGHT_PI) * u_low[:, None, None] * M[None, :, :] / uR
    return PoincareGaugeField(a, b)


def _cross(a, b) -> np.ndarray:
    return np.array([a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]])


def _kernel(rp: RetardedPoint) -> np.ndarray:
    r_vec, r, v = rp.r_vec, rp.r, rp.v_hat
    acc = rp.accel_hat
    w = r_vec - r * v
    kappa_r = r - r_vec @ v
    return (w * (1.0 - v @ v) + _cross(r_vec, _cross(w, acc))) / kappa_r ** 3


def field_strengths_at(x, s: SourceParticle, const: Constants = DEFAULT,
                       rp: Optional[RetardedPoint] = None, **kw) -> EMDecomposition:
    """Electric and magnetic Poincare fields of one source (velocity + acceleration terms)."""
    x = np.asarray(x, dtype=float)
    if rp is None:
        rp = retarded_time(x, s.worldline, **kw)
    P, M = s.charges(rp.y_plus, rp.u_plus)
    K = _kernel(rp)
    n = rp.r_vec / rp.r
    lam, g = const.lam, const.g
    # every column of d is parallel to K, so h = n x d is (n x K) times the same charge
    nK = _cross(n, K)
    cP = -(g / FOUR_PI) * lam * lam * P
    cM = (g / EIGHT_PI) * lam * M
    return EMDecomposition(np.outer(K, cP), np.outer(nK, cP),
                           K[:, None, None] * cM, nK[:, None, None] * cM)


class FieldProvider:
    """Superposed leading-order fields of a set of sources with frozen histories."""

    def __init__(self, sources: Sequence[SourceParticle], const: Constants = DEFAULT,
                 r_min: float = 1e-6, method: str = "newton"):
        self.sources = list(sources)
        self.const = const
        self.r_min = r_min
        self.method = method

    def em(self, x, exclude=()) -> EMDecomposition:
        total = None
        for src in self.sources:
            if any(src is e for e in exclude):
                continue
            em = field_strengths_at(x, src, self.const, r_min=self.r_min, method=self.method)
            total = em if total is None else total + em
        return EMDecomposition.zero() if total is None else total

    def strengths(self, x, exclude=()) -> FieldStrengths:
        return self.em(x, exclude).to_strengths()

    def potential(self, x, exclude=()) -> PoincareGaugeField:
        total = PoincareGaugeField.zero()
        for src in self.sources:
            if any(src is e for e in exclude):
                continue
            total = total + lienard_wiechert(x, src, self.const, r_min=self.r_min, method=self.method)
        return total

    def configuration(self, scale: float = 1.0, h_fd: float = 1e-4) -> GaugeFieldConfiguration:
        return GaugeFieldConfiguration(lambda x: self.potential(x).scaled(scale), h_fd=h_fd)


def _second_derivative(fn, x, mu, h):
    e = np.zeros(4)
    e[mu] = h
    return (-fn(x + 2 * e) + 16.0 * fn(x + e) - 30.0 * fn(x) + 16.0 * fn(x - e) - fn(x - 2 * e)) / (12.0 * h * h)


def linearized_residual(cfg: GaugeFieldConfiguration, x, s: Optional[SourceParticle] = None, *,
                        h: Optional[float] = None, h_rel: float = 3e-3) -> tuple[np.ndarray, np.ndarray]:
    """Wave operator d^2 = -d_t^2 + laplacian applied to a and b at x.

    Off the worldline the point sources vanish, so this is the residual
    of the linearized field equations. The step defaults to ``h_rel``
    times the distance to the source's retarded point when a source is
    given, else the configuration's ``h_fd``.
    """
    x = np.asarray(x, dtype=float)
    if h is None:
        h = h_rel * retarded_time(x, s.worldline).r if s is not None else cfg.h_fd

    def fa(p):
        return cfg(p).a

    def fb(p):
        return cfg(p).b

    res_a = sum(ETA[m, m] * _second_derivative(fa, x, m, h) for m in range(4))
    res_b = sum(ETA[m, m] * _second_derivative(fb, x, m, h) for m in range(4))
    return res_a, res_b


def nonlinear_residual(cfg: GaugeFieldConfiguration, x, const: Constants = DEFAULT, *,
                       h: float = 1e-3) -> tuple[np.ndarray, np.ndarray]:
    """Source-free left-hand sides of the coupled Poincare field equations.

    res_a[n, a] = d^m f_{mn}^a + g/lam a^{m b} h_{mn}^a_b - g/lam b^{m a}_b f_{mn}^b
    res_b[n]    = d^m h_{mn} + g/lam sum_m eta^{mm} (h_{mn} b_m - b_m h_{mn})  (mixed inner)

    Strengths are built with the bilinear terms scaled by g, matching the
    g-rescaled potentials. ``cfg`` should hold the physical fields.
    """
    x = np.asarray(x, dtype=float)
    lam, g = const.lam, const.g
    k = g / lam

    def F(p):
        return field_strengths(cfg, p, lam=lam, coupling=g)

    # div[n, ...] = d^m F_{mn}
    div_f = np.zeros((4, 4))
    div_h = np.zeros((4, 4, 4))
    for m in range(4):
        e = np.zeros(4)
        e[m] = h
        p1, m1, p2, m2 = F(x + e), F(x - e), F(x + 2 * e), F(x - 2 * e)
        df = (8.0 * (p1.f[m] - m1.f[m]) - (p2.f[m] - m2.f[m])) / (12.0 * h)
        dh = (8.0 * (p1.h[m] - m1.h[m]) - (p2.h[m] - m2.h[m])) / (12.0 * h)
        div_f += ETA[m, m] * df
        div_h += ETA[m, m] * dh
    F0 = F(x)
    fld = cfg(x)
    a_up = ETA @ fld.a           # a^{m b}
    B_up = np.einsum("mk,kab->mab", ETA, fld.b_mixed)  # b^{m a}_b
    H = F0.h_mixed
    res_a = div_f + k * (np.einsum("mb,mnab->na", a_up, H) - np.einsum("mab,mnb->na", B_up, F0.f))
    res_B = div_h @ ETA + k * (np.einsum("mnag,mgb->nab", H, B_up) - np.einsum("mag,mngb->nab", B_up, H))
    return res_a, res_B @ ETA
