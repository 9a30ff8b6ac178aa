"""Energy-momentum tensor, Poynting flux and radiated power."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .algebra import FieldStrengths
from .constants import DEFAULT, ETA, SIG, Constants, cross3
from .dynamics import coupling_bracket
from .retarded import EMDecomposition, RetardedPoint, SourceParticle, field_strengths_at, retarded_time


class RadiationError(ValueError):
    pass


@dataclass(frozen=True)
class StressTensor:
    theta: np.ndarray  # theta[m, n] = Theta^m_n

    @property
    def raised(self) -> np.ndarray:
        """Theta^{mn}."""
        return self.theta @ ETA


def stress_tensor(F: FieldStrengths, const: Constants = DEFAULT) -> StressTensor:
    """Theta^m_n = -1/(4 lam^2) { -1/4 delta f.f - f^{mr}_a f_{rn}^a + (same for h) }.

    The trace term enters with -1/4, the sign for which the tensor is
    traceless and divergence-free on source-free solutions; the
    energy-flux components Theta^i_0 do not involve it.
    """
    lam = const.lam
    sig = SIG
    # spacetime indices up on the first factor, inner indices down
    f_up = sig[:, None, None] * sig[None, :, None] * F.f * sig[None, None, :]
    h_up = (sig[:, None, None, None] * sig[None, :, None, None] * F.h
            * sig[None, None, :, None] * sig[None, None, None, :])
    ff = float(np.sum(F.f * f_up))
    hh = float(np.sum(F.h * h_up))
    t_f = np.einsum("mra,rna->mn", f_up, F.f)
    t_h = np.einsum("mrab,rnab->mn", h_up, F.h)
    theta = -(1.0 / (4.0 * lam * lam)) * (-0.25 * np.eye(4) * (ff + hh) - t_f - t_h)
    return StressTensor(theta)


def poynting(em: EMDecomposition, const: Constants = DEFAULT) -> np.ndarray:
    """Theta^i_0 = (d^a x h_a + d^{ab} x h_{ab}) / (4 lam^2)."""
    lam = const.lam
    s = cross3(em.d, em.h * SIG).sum(axis=1)
    h_low = em.h_rot * SIG[None, :, None] * SIG[None, None, :]
    s = s + cross3(em.d_rot, h_low).sum(axis=(1, 2))
    return s / (4.0 * lam * lam)


@dataclass(frozen=True)
class Emitter:
    """Radiating particle at its emission event: charges, 3-velocity, 3-acceleration."""

    P: np.ndarray
    M: np.ndarray
    v: np.ndarray
    a: np.ndarray

    @classmethod
    def from_retarded(cls, src: SourceParticle, rp: RetardedPoint) -> Emitter:
        P, M = src.charges(rp.y_plus, rp.u_plus)
        return cls(P, M, rp.v_hat, rp.accel_hat)

    @classmethod
    def at(cls, src: SourceParticle, tau: float) -> Emitter:
        y, u, du = src.worldline.state(tau)
        P, M = src.charges(y, u)
        v = u[1:] / u[0]
        return cls(P, M, v, (du[1:] - v * du[0]) / (u[0] * u[0]))

    @classmethod
    def point_mass(cls, mass: float, v, a) -> Emitter:
        """Identified charges of a particle at the origin with velocity v."""
        v = np.asarray(v, dtype=float)
        gamma = 1.0 / math.sqrt(1.0 - v @ v)
        return cls(mass * gamma * np.concatenate([[1.0], v]), np.zeros((4, 4)), v, np.asarray(a, dtype=float))

    def bracket(self, const: Constants = DEFAULT) -> float:
        return coupling_bracket(self.P, self.M, self.P, self.M, const)


def angular_power(em: Emitter, n, const: Constants = DEFAULT) -> np.ndarray:
    """Signed dP_ret/dOmega in direction(s) n (unit 3-vectors, shape (3,) or (N, 3))."""
    n = np.asarray(n, dtype=float)
    norms = np.linalg.norm(n, axis=-1)
    if np.any(np.abs(norms - 1.0) > 1e-12):
        raise RadiationError("direction vectors must be unit length")
    w = np.cross(n, np.cross(n - em.v, em.a))
    kappa = 1.0 - n @ em.v
    return em.bracket(const) / (16.0 * math.pi) * np.sum(w * w, axis=-1) / kappa ** 5


def total_power(em: Emitter, const: Constants = DEFAULT) -> float:
    """Signed relativistic Larmor power per unit emission time."""
    v, a = em.v, em.a
    va = np.cross(v, a)
    return em.bracket(const) / 6.0 * (a @ a - va @ va) / (1.0 - v @ v) ** 3


@dataclass(frozen=True)
class PowerResult:
    value: float

    @property
    def magnitude(self) -> float:
        return abs(self.value)

    @property
    def sign(self) -> int:
        return int(np.sign(self.value))


def circular_orbit_power(m: float, v_hat: float, rho: float, gamma: float = 1.0) -> PowerResult:
    """-(1/6) gamma m^2 v^4 / ((1 - v^2)^2 rho^2) for a circular orbit (geometrized units)."""
    if not 0.0 <= v_hat < 1.0:
        raise RadiationError(f"speed must satisfy 0 <= v < 1, got {v_hat}")
    if not rho > 0.0:
        raise RadiationError(f"orbit radius must be positive, got {rho}")
    if not m > 0.0:
        raise RadiationError(f"mass must be positive, got {m}")
    return PowerResult(-gamma * m * m * v_hat ** 4 / (6.0 * (1.0 - v_hat ** 2) ** 2 * rho ** 2))


@dataclass(frozen=True)
class AngularGrid:
    nodes: np.ndarray     # (N, 3) unit vectors
    weights: np.ndarray   # (N,)
    theta: np.ndarray
    phi: np.ndarray
    n_theta: int = 0
    n_phi: int = 0
    scheme: str = "gauss-legendre x trapezoid"

    @classmethod
    def product(cls, n_theta: int = 64, n_phi: int = 128) -> AngularGrid:
        """Gauss-Legendre in cos(theta) times the uniform trapezoid rule in phi."""
        x, wx = np.polynomial.legendre.leggauss(n_theta)
        phi = 2.0 * math.pi * np.arange(n_phi) / n_phi
        ct, ph = np.meshgrid(x, phi, indexing="ij")
        st = np.sqrt(1.0 - ct * ct)
        nodes = np.stack([st * np.cos(ph), st * np.sin(ph), ct], axis=-1).reshape(-1, 3)
        nodes /= np.linalg.norm(nodes, axis=1)[:, None]
        weights = (wx[:, None] * np.full(n_phi, 2.0 * math.pi / n_phi)[None, :]).reshape(-1)
        return cls(nodes, weights, np.arccos(ct).reshape(-1), ph.reshape(-1), n_theta, n_phi)

    def integrate(self, values) -> float:
        # fixed-order pairwise summation
        return float(np.sum(np.asarray(values) * self.weights))

    def __len__(self):
        return len(self.weights)


def integrate_angular_power(em: Emitter, grid: Optional[AngularGrid] = None,
                            const: Constants = DEFAULT) -> float:
    grid = grid or AngularGrid.product()
    return grid.integrate(angular_power(em, grid.nodes, const))


@dataclass(frozen=True)
class FluxResult:
    value: float
    error_estimate: float
    converged: bool
    n_nodes: int
    emission_tau: float


def _sphere_flux(src, grid, center, radius, t, const, jacobian, kw):
    vals = np.empty(len(grid))
    for i, n in enumerate(grid.nodes):
        x = np.concatenate([[t], center + radius * n])
        rp = retarded_time(x, src.worldline, **kw)
        S = poynting(field_strengths_at(x, src, const, rp=rp), const)
        val = radius * radius * (S @ n)
        if jacobian:
            val *= 1.0 - (rp.r_vec / rp.r) @ rp.v_hat
        vals[i] = val
    return grid.integrate(vals)


def flux_integral(src: SourceParticle, radius: float, grid: Optional[AngularGrid] = None,
                  t: float = 0.0, const: Constants = DEFAULT, *, mode: str = "emission",
                  center=None, rtol: float = 1e-6, estimate_error: bool = True,
                  **kw) -> FluxResult:
    """Energy flux of the source's field through a sphere of radius ``radius``.

    mode "emission": the sphere is centred on the emission event y(t_r)
    with t_r = t - radius, so every node shares that retarded time; each
    node carries the dt/dt_ret = 1 - n.v factor and the result is the
    power per unit emission time, comparable with :func:`total_power`.

    mode "coordinate": sphere centred at ``center`` (default origin) at
    observation time t, no Jacobian; the result is dE/dt through it.

    The error estimate compares against the same rule with half the nodes
    in each direction.
    """
    grid = grid or AngularGrid.product()
    if mode == "emission":
        tau_e, y_e, _, _ = src.worldline.at_coordinate_time(t - radius)
        c = y_e[1:]
        jac = True
    elif mode == "coordinate":
        tau_e = float("nan")
        c = np.zeros(3) if center is None else np.asarray(center, dtype=float)
        jac = False
    else:
        raise ValueError(f"unknown flux mode {mode!r}")
    value = _sphere_flux(src, grid, c, radius, t, const, jac, kw)
    err = 0.0
    if estimate_error:
        coarse = AngularGrid.product(max(grid.n_theta // 2, 2), max(grid.n_phi // 2, 4))
        err = abs(value - _sphere_flux(src, coarse, c, radius, t, const, jac, kw))
    return FluxResult(value, err, err <= rtol * abs(value) or value == 0.0, len(grid), tau_e)
