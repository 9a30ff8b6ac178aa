"""Gauge-invariant line element and static clock rates."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .algebra import AntisymTensor, PoincareGaugeField
from .constants import DEFAULT, ETA, G_NEWTON_LIMIT, SIG, Constants, mdot
from .retarded import SourceParticle, identified_charges, lienard_wiechert
from .worldline import Worldline


class GeometryError(ValueError):
    pass


@dataclass(frozen=True)
class LineElementSample:
    flat_part: float
    field_part: float

    @property
    def ds2(self) -> float:
        return self.flat_part + self.field_part


def line_element(ydot, fields: PoincareGaugeField, Q, N, m: float, dsigma: float,
                 const: Constants = DEFAULT) -> LineElementSample:
    """ds^2 along a trajectory with tangent ``ydot`` in the physical fields ``fields``.

    flat part  -ydot.ydot dsigma^2
    field part -2 g (a_m^a Q_a / m - b_m^{ab} N_ab / (2 lam m)) ydot^m dsigma^2

    The field part's sign is the one that matches the attractive static
    potentials used throughout (a_0 = -lam^2 P / 4 pi r); with it a static
    source gives g_tt = 1 - 2 gamma m_A / r.
    """
    if not m > 0:
        raise GeometryError("test mass must be positive")
    if not dsigma > 0:
        raise GeometryError("dsigma must be positive")
    ydot = np.asarray(ydot, dtype=float)
    Nm = N.matrix() if isinstance(N, AntisymTensor) else np.asarray(N, dtype=float)
    Q_low = SIG * np.asarray(Q, dtype=float)
    N_low = ETA @ Nm @ ETA
    coupling = fields.a @ Q_low / m - np.einsum("mab,ab->m", fields.b, N_low) / (2.0 * const.lam * m)
    ds2 = dsigma * dsigma
    return LineElementSample(-mdot(ydot, ydot) * ds2, -2.0 * const.g * float(coupling @ ydot) * ds2)


def static_metric_factor(m_A: float, r: float, newton_gamma: float = 1.0,
                         test_mass: float = 1.0) -> float:
    """g_tt felt by a clock at rest a distance r from a static mass m_A.

    Runs the full chain: static source worldline, retarded potentials,
    identified test charges and :func:`line_element`, with g^2 = 4 pi.
    """
    const = Constants(newton_gamma=newton_gamma, g=G_NEWTON_LIMIT)
    src = SourceParticle(m_A, Worldline.static(tau_range=(-10.0 * r, 10.0 * r)))
    y = np.array([0.0, r, 0.0, 0.0])
    u = np.array([1.0, 0.0, 0.0, 0.0])
    a0 = lienard_wiechert(y, src, const, r_min=0.0)
    Q, N = identified_charges(test_mass, y, u)
    return line_element(u, a0.scaled(const.g), Q, N, test_mass, 1.0, const).ds2


def clock_rate(m_A: float, r: float, newton_gamma: float = 1.0, min_ratio: float = 10.0) -> float:
    """dtau/dt = sqrt(1 - 2 gamma m_A / r) for a static clock.

    Refuses r <= 2 gamma m_A outright and r < min_ratio * gamma m_A as
    outside the weak-field regime (set min_ratio=2 to disable the guard).
    """
    rs = newton_gamma * m_A
    if r <= 2.0 * rs:
        raise GeometryError(f"r={r:g} is inside 2 gamma m_A={2 * rs:g}")
    if r < min_ratio * rs:
        raise GeometryError(f"r={r:g} below weak-field guard {min_ratio:g} gamma m_A")
    return math.sqrt(1.0 - 2.0 * rs / r)
