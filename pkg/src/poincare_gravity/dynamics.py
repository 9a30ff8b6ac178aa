"""Point-particle motion in Poincare fields."""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np

from .algebra import AntisymTensor, FieldStrengths
from .constants import DEFAULT, ETA, SIG, Constants, mdot
from .retarded import EMDecomposition, identified_charges


class ZeroSeparation(ValueError):
    pass


class StepRejected(RuntimeError):
    def __init__(self, error: float, dtau: float):
        super().__init__(f"step dtau={dtau:.3e} rejected (error ratio {error:.3e})")
        self.error = error
        self.dtau = dtau


@dataclass(frozen=True)
class ParticleState:
    tau: float
    y: np.ndarray
    u: np.ndarray
    mass: float
    p_grav: Optional[np.ndarray] = None
    m_grav: Optional[AntisymTensor] = None
    identification_mode: str = "dynamic"
    origin: np.ndarray = field(default_factory=lambda: np.zeros(4))

    def __post_init__(self):
        object.__setattr__(self, "y", np.asarray(self.y, dtype=float))
        object.__setattr__(self, "u", np.asarray(self.u, dtype=float))
        if not self.mass > 0:
            raise ValueError("mass must be positive")
        if self.identification_mode not in ("dynamic", "frozen"):
            raise ValueError(f"bad identification_mode {self.identification_mode!r}")
        if self.identification_mode == "frozen" and (self.p_grav is None or self.m_grav is None):
            P, M = identified_charges(self.mass, self.y - self.origin, self.u)
            object.__setattr__(self, "p_grav", P if self.p_grav is None else np.asarray(self.p_grav, float))
            if self.m_grav is None:
                object.__setattr__(self, "m_grav", AntisymTensor.from_matrix(M))

    @classmethod
    def at_rest(cls, position, mass: float, t: float = 0.0, **kw) -> ParticleState:
        return cls.moving(position, (0.0, 0.0, 0.0), mass, t, **kw)

    @classmethod
    def moving(cls, position, velocity, mass: float, t: float = 0.0, **kw) -> ParticleState:
        v = np.asarray(velocity, dtype=float)
        v2 = float(v @ v)
        if v2 >= 1.0:
            raise ValueError("speed must be below 1")
        gamma = 1.0 / math.sqrt(1.0 - v2)
        y = np.concatenate([[t], np.asarray(position, dtype=float)])
        return cls(0.0, y, gamma * np.concatenate([[1.0], v]), mass, **kw)

    def charges(self) -> tuple[np.ndarray, np.ndarray]:
        if self.identification_mode == "dynamic":
            return identified_charges(self.mass, self.y - self.origin, self.u)
        return self.p_grav, self.m_grav.matrix()

    @property
    def norm_residual(self) -> float:
        return abs(mdot(self.u, self.u) + 1.0)

    @property
    def coordinate_velocity(self) -> np.ndarray:
        return self.u[1:] / self.u[0]


def identify(state: ParticleState) -> ParticleState:
    """Set the gravitational charges equal to the inertial ones (frozen copy)."""
    P, M = identified_charges(state.mass, state.y - state.origin, state.u)
    return replace(state, p_grav=P, m_grav=AntisymTensor.from_matrix(M))


def four_force(state: ParticleState, fields, const: Constants = DEFAULT,
               P: Optional[np.ndarray] = None, M: Optional[np.ndarray] = None) -> np.ndarray:
    """Covariant force m d^2y_m/dtau^2 = g (f_{mn}^a P_a - h_{mn}^{ab} M_ab / (2 lam)) u^n.

    ``fields`` are the strengths of the other particles at the particle's
    position (either :class:`EMDecomposition` or :class:`FieldStrengths`).
    """
    if P is None or M is None:
        P, M = state.charges()
    return _force(state.u, fields, P, M, const)


def _force(u, fields, P, M, const):
    if isinstance(fields, EMDecomposition):
        return _force_em(u, fields, P, M, const)
    F = fields
    P_low = SIG * P
    M_low = ETA @ M @ ETA
    coeff = F.f @ P_low - np.einsum("mnab,ab->mn", F.h, M_low) / (2.0 * const.lam)
    return const.g * (coeff @ u)


def _force_em(u, em: EMDecomposition, P, M, const):
    # same contraction written with the electric/magnetic split:
    # F_0 = g E.u, F_i = -g (u^0 E + u x B)_i
    P_low = SIG * P
    M_low = ETA @ M @ ETA
    k = 1.0 / (2.0 * const.lam)
    m_flat = M_low.ravel()
    E = em.d @ P_low - k * (em.d_rot.reshape(3, 16) @ m_flat)
    B = em.h @ P_low - k * (em.h_rot.reshape(3, 16) @ m_flat)
    u0, u1, u2, u3 = u
    F = np.empty(4)
    F[0] = E[0] * u1 + E[1] * u2 + E[2] * u3
    F[1] = -(u0 * E[0] + u2 * B[2] - u3 * B[1])
    F[2] = -(u0 * E[1] + u3 * B[0] - u1 * B[2])
    F[3] = -(u0 * E[2] + u1 * B[1] - u2 * B[0])
    return const.g * F


def coordinate_acceleration(u: np.ndarray, udot: np.ndarray) -> np.ndarray:
    """d^2 x/dt^2 from four-velocity and its proper-time derivative."""
    return (udot[1:] - u[1:] * udot[0] / u[0]) / (u[0] * u[0])


def newton_accel(m_A: float, z, gamma: float = 1.0) -> np.ndarray:
    """Newtonian acceleration -gamma m_A z/|z|^3 of a test body at separation z."""
    z = np.asarray(z, dtype=float)
    r = float(np.sqrt(z @ z))
    if r == 0.0:
        raise ZeroSeparation("separation vector is zero")
    return -gamma * m_A * z / r ** 3


def coupling_bracket(P, M, Q, N, const: Constants = DEFAULT) -> float:
    """lam^2 P.Q + 1/4 M.N with full metric contractions."""
    P = np.asarray(P, dtype=float)
    Q = np.asarray(Q, dtype=float)
    Mm = M.matrix() if isinstance(M, AntisymTensor) else np.asarray(M, dtype=float)
    Nm = N.matrix() if isinstance(N, AntisymTensor) else np.asarray(N, dtype=float)
    lam = const.lam
    return lam * lam * mdot(P, Q) + 0.25 * float(np.sum(Mm * (ETA @ Nm @ ETA)))


@dataclass(frozen=True)
class IntegratorConfig:
    dtau: float = 1e-3
    tol_u: float = 1e-9
    method: str = "rk4"          # rk4 | adaptive
    renormalize_u: bool = False
    atol: float = 1e-12
    rtol: float = 1e-10
    max_halvings: int = 30

    def __post_init__(self):
        if not self.dtau > 0:
            raise ValueError("dtau must be positive")
        if not (self.tol_u > 0 and self.atol > 0 and self.rtol > 0):
            raise ValueError("tolerances must be positive")
        if self.method not in ("rk4", "adaptive"):
            raise ValueError(f"unknown integrator method {self.method!r}")


# Dormand-Prince 5(4)
_DP_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_DP_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_DP_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_DP_B4 = np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40])


FieldFn = Callable[[np.ndarray], object]


def _rhs(state: ParticleState, fields: FieldFn, const: Constants):
    mass, origin = state.mass, state.origin
    dynamic = state.identification_mode == "dynamic"
    if not dynamic:
        P0, M0 = state.charges()

    def f(tau, z):
        y, u = z[:4], z[4:]
        P, M = identified_charges(mass, y - origin, u) if dynamic else (P0, M0)
        force = _force(u, fields(y), P, M, const)
        return np.concatenate([u, ETA @ force / mass])
    return f


def rk4_step(f, tau, z, h):
    k1 = f(tau, z)
    k2 = f(tau + 0.5 * h, z + 0.5 * h * k1)
    k3 = f(tau + 0.5 * h, z + 0.5 * h * k2)
    k4 = f(tau + h, z + h * k3)
    return z + h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4), k1


def dopri_step(f, tau, z, h, atol, rtol):
    ks = []
    for i in range(7):
        zi = z + h * sum(a * k for a, k in zip(_DP_A[i], ks)) if i else z
        ks.append(f(tau + _DP_C[i] * h, zi))
    K = np.array(ks)
    z5 = z + h * (_DP_B5 @ K)
    z4 = z + h * (_DP_B4 @ K)
    scale = atol + rtol * np.maximum(np.abs(z), np.abs(z5))
    err = float(np.sqrt(np.mean(((z5 - z4) / scale) ** 2)))
    if err > 1.0:
        raise StepRejected(err, h)
    return z5, ks[0]


def step(state: ParticleState, fields: FieldFn, cfg: IntegratorConfig,
         const: Constants = DEFAULT, dtau: Optional[float] = None) -> ParticleState:
    """Advance one proper-time step.

    ``fields(y)`` returns the external field strengths at event y from a
    frozen snapshot of the other particles. In adaptive mode a rejected
    step is retried with half the step until it is accepted.
    """
    target = cfg.dtau if dtau is None else dtau
    f = _rhs(state, fields, const)
    z = np.concatenate([state.y, state.u])
    tau = state.tau
    if cfg.method == "rk4":
        z, _ = rk4_step(f, tau, z, target)
        tau += target
    else:
        done, h, halvings = 0.0, target, 0
        while done < target * (1.0 - 1e-12):
            h = min(h, target - done)
            try:
                z, _ = dopri_step(f, tau, z, h, cfg.atol, cfg.rtol)
            except StepRejected:
                halvings += 1
                if halvings > cfg.max_halvings:
                    raise
                h *= 0.5
                continue
            tau += h
            done += h
    y, u = z[:4], z[4:]
    if cfg.renormalize_u:
        u = u / math.sqrt(-mdot(u, u))
    return replace(state, tau=tau, y=y, u=u)


def acceleration(state: ParticleState, fields, const: Constants = DEFAULT) -> np.ndarray:
    """Proper-time derivative of u (contravariant)."""
    return ETA @ four_force(state, fields, const) / state.mass


def integrate(state: ParticleState, fields: FieldFn, cfg: IntegratorConfig, n_steps: int,
              const: Constants = DEFAULT, callback=None) -> list[ParticleState]:
    out = [state]
    for _ in range(n_steps):
        state = step(state, fields, cfg, const)
        out.append(state)
        if callback is not None:
            callback(state)
    return out
