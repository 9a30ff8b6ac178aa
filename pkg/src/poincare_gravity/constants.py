"""Metric, coupling constants and small shared helpers.

Everything internal runs in geometrized units (G = c = 1), so the Planck
length squared equals Newton's constant and both are 1 by default.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

ETA = np.diag([-1.0, 1.0, 1.0, 1.0])
ETA.setflags(write=False)

# signature vector; multiplying by it lowers/raises one index
SIG = np.array([-1.0, 1.0, 1.0, 1.0])
SIG.setflags(write=False)

G_NEWTON_LIMIT = math.sqrt(4.0 * math.pi)


@dataclass(frozen=True)
class Constants:
    """Coupling data carried through every field evaluation.

    ``lam`` is the inner length scale, fixed to the Planck length
    ``sqrt(newton_gamma)``. ``g`` defaults to the Newton-limit value
    ``sqrt(4 pi)``.
    """

    newton_gamma: float = 1.0
    g: float = G_NEWTON_LIMIT

    @property
    def lam(self) -> float:
        return math.sqrt(self.newton_gamma)

    @property
    def newton_mode(self) -> bool:
        return math.isclose(self.g * self.g, 4.0 * math.pi, rel_tol=1e-12)


DEFAULT = Constants()


def mdot(u: np.ndarray, v: np.ndarray) -> float:
    """Minkowski product u . v for two contravariant 4-vectors."""
    return float(-u[0] * v[0] + u[1] * v[1] + u[2] * v[2] + u[3] * v[3])


def lower(v: np.ndarray) -> np.ndarray:
    return SIG * v


def cross3(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Cross product over the leading axis; trailing axes broadcast."""
    return np.stack([a[1] * b[2] - a[2] * b[1],
                     a[2] * b[0] - a[0] * b[2],
                     a[0] * b[1] - a[1] * b[0]])
