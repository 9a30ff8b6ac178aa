"""Sampled timelike worldlines with cubic Hermite interpolation."""
from __future__ import annotations

import csv
import math
from pathlib import Path
from typing import Callable, Iterable

import numpy as np

from .constants import SIG


class WorldlineError(ValueError):
    pass


def _hermite_power(p0, p1, m0, m1) -> np.ndarray:
    """Cubic Hermite polynomial in power form, rows = coefficients of s^0..s^3."""
    return np.array([p0, m0, -3 * p0 - 2 * m0 + 3 * p1 - m1, 2 * p0 + m0 - 2 * p1 + m1])


class Worldline:
    """Ordered samples (tau, y, u, du) of a particle history.

    Positions are interpolated with cubic Hermite polynomials built from
    (y, u); four-velocity with the Hermite polynomial built from (u, du),
    whose derivative supplies the four-acceleration between samples.
    """

    def __init__(self, tau, y, u, du=None, *, check: bool = True, norm_tol: float = 1e-9):
        self.tau = np.asarray(tau, dtype=float)
        self.y = np.asarray(y, dtype=float).reshape(-1, 4)
        self.u = np.asarray(u, dtype=float).reshape(-1, 4)
        n = len(self.tau)
        if n < 2:
            raise WorldlineError("a worldline needs at least two samples")
        if self.y.shape[0] != n or self.u.shape[0] != n:
            raise WorldlineError("sample arrays have inconsistent lengths")
        if du is None:
            du = np.gradient(self.u, self.tau, axis=0, edge_order=2) if n > 2 else np.zeros_like(self.u)
        self.du = np.asarray(du, dtype=float).reshape(-1, 4)
        self._cache = {}
        if check:
            self.validate(norm_tol)

    def validate(self, norm_tol: float = 1e-9):
        if np.any(np.diff(self.tau) <= 0):
            raise WorldlineError("tau must be strictly increasing")
        if np.any(np.diff(self.y[:, 0]) <= 0):
            raise WorldlineError("coordinate time must be strictly increasing")
        if np.any(self.u[:, 0] <= 0):
            raise WorldlineError("four-velocity must be future pointing")
        uu = np.einsum("ij,ij->i", self.u * SIG, self.u)
        if np.max(np.abs(uu + 1.0)) > norm_tol:
            raise WorldlineError(f"u.u deviates from -1 by {np.max(np.abs(uu + 1.0)):.3e}")

    def __len__(self):
        return len(self.tau)

    @property
    def tau_range(self) -> tuple[float, float]:
        return float(self.tau[0]), float(self.tau[-1])

    def index(self, tau: float) -> int:
        k = int(np.searchsorted(self.tau, tau, side="right")) - 1
        return min(max(k, 0), len(self.tau) - 2)

    def _coeffs(self, k: int) -> tuple[np.ndarray, np.ndarray]:
        c = self._cache.get(k)
        if c is None:
            h = self.tau[k + 1] - self.tau[k]
            c = (_hermite_power(self.y[k], self.y[k + 1], h * self.u[k], h * self.u[k + 1]),
                 _hermite_power(self.u[k], self.u[k + 1], h * self.du[k], h * self.du[k + 1]))
            self._cache[k] = c
        return c

    def position_coeffs(self, k: int) -> np.ndarray:
        """Power-basis coefficients c[p] with y(s) = sum_p c[p] s^p on interval k."""
        return self._coeffs(k)[0]

    def state(self, tau: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Interpolated (y, u, du) at proper time tau (clamped to the sampled range)."""
        k = self.index(tau)
        t0 = self.tau[k]
        h = self.tau[k + 1] - t0
        s = min(max((tau - t0) / h, 0.0), 1.0)
        cy, cu = self._coeffs(k)
        pw = np.array([1.0, s, s * s, s * s * s])
        dpw = np.array([0.0, 1.0, 2.0 * s, 3.0 * s * s]) / h
        return pw @ cy, pw @ cu, dpw @ cu

    def at_coordinate_time(self, t: float) -> tuple[float, np.ndarray, np.ndarray, np.ndarray]:
        """Proper time and state where y^0 = t."""
        k = int(np.searchsorted(self.y[:, 0], t)) - 1
        k = min(max(k, 0), len(self.tau) - 2)
        c = self.position_coeffs(k)[:, 0]
        lo, hi = 0.0, 1.0
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if c[0] + mid * (c[1] + mid * (c[2] + mid * c[3])) < t:
                lo = mid
            else:
                hi = mid
            if hi - lo < 1e-15:
                break
        tau = self.tau[k] + 0.5 * (lo + hi) * (self.tau[k + 1] - self.tau[k])
        return (tau,) + self.state(tau)

    # constructors -----------------------------------------------------

    @classmethod
    def from_functions(cls, taus: Iterable[float], y_fn: Callable, u_fn: Callable,
                       du_fn: Callable | None = None, **kw) -> Worldline:
        taus = np.asarray(list(taus), dtype=float)
        y = np.array([y_fn(t) for t in taus])
        u = np.array([u_fn(t) for t in taus])
        du = None if du_fn is None else np.array([du_fn(t) for t in taus])
        return cls(taus, y, u, du, **kw)

    @classmethod
    def uniform(cls, velocity=(0.0, 0.0, 0.0), position=(0.0, 0.0, 0.0),
                tau_range=(-1e3, 1e3), n: int = 3) -> Worldline:
        """Straight worldline through (0, position) with 3-velocity ``velocity``."""
        v = np.asarray(velocity, dtype=float)
        v2 = float(v @ v)
        if v2 >= 1.0:
            raise WorldlineError("speed must be below 1")
        gamma = 1.0 / math.sqrt(1.0 - v2)
        u = gamma * np.concatenate([[1.0], v])
        y0 = np.concatenate([[0.0], np.asarray(position, dtype=float)])
        taus = np.linspace(tau_range[0], tau_range[1], n)
        return cls(taus, y0 + taus[:, None] * u, np.tile(u, (n, 1)), np.zeros((n, 4)))

    @classmethod
    def static(cls, position=(0.0, 0.0, 0.0), tau_range=(-1e3, 1e3), n: int = 3) -> Worldline:
        return cls.uniform((0.0, 0.0, 0.0), position, tau_range, n)

    @classmethod
    def circular(cls, radius: float, speed: float, tau_range: tuple[float, float],
                 n: int, phase: float = 0.0) -> Worldline:
        """Circular orbit in the xy-plane about the origin, counter-clockwise."""
        if not 0.0 <= speed < 1.0:
            raise WorldlineError("speed must lie in [0, 1)")
        gamma = 1.0 / math.sqrt(1.0 - speed * speed)
        w = speed / radius  # angular frequency in coordinate time

        def y(tau):
            t = gamma * tau
            return np.array([t, radius * math.cos(w * t + phase), radius * math.sin(w * t + phase), 0.0])

        def u(tau):
            t = gamma * tau
            return gamma * np.array([1.0, -speed * math.sin(w * t + phase), speed * math.cos(w * t + phase), 0.0])

        def du(tau):
            t = gamma * tau
            return gamma * gamma * w * speed * np.array(
                [0.0, -math.cos(w * t + phase), -math.sin(w * t + phase), 0.0])

        return cls.from_functions(np.linspace(tau_range[0], tau_range[1], n), y, u, du)

    # CSV -----------------------------------------------------------------

    HEADER = ["tau", "y0", "y1", "y2", "y3", "u0", "u1", "u2", "u3"]

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            wr = csv.writer(fh, lineterminator="\n")
            wr.writerow(self.HEADER)
            for t, y, u in zip(self.tau, self.y, self.u):
                wr.writerow([repr(float(t))] + [repr(float(v)) for v in y] + [repr(float(v)) for v in u])

    @classmethod
    def from_csv(cls, path) -> Worldline:
        with open(Path(path), newline="") as fh:
            rd = csv.reader(fh)
            header = next(rd, None)
            if header is None or [h.strip() for h in header] != cls.HEADER:
                raise WorldlineError(f"{path}: expected header {','.join(cls.HEADER)}")
            rows = [[float(v) for v in row] for row in rd if row]
        arr = np.array(rows)
        return cls(arr[:, 0], arr[:, 1:5], arr[:, 5:9])


class WorldlineBuilder:
    """Growable history; ``snapshot()`` hands out frozen views for field evaluation."""

    def __init__(self, capacity: int = 1024):
        self._tau = np.empty(capacity)
        self._y = np.empty((capacity, 4))
        self._u = np.empty((capacity, 4))
        self._du = np.empty((capacity, 4))
        self.n = 0

    def append(self, tau, y, u, du) -> None:
        if self.n == len(self._tau):
            cap = 2 * len(self._tau)
            for name in ("_tau", "_y", "_u", "_du"):
                old = getattr(self, name)
                new = np.empty((cap,) + old.shape[1:])
                new[: self.n] = old[: self.n]
                setattr(self, name, new)
        self._tau[self.n] = tau
        self._y[self.n] = y
        self._u[self.n] = u
        self._du[self.n] = du
        self.n += 1

    def extend(self, w: Worldline) -> None:
        for row in zip(w.tau, w.y, w.u, w.du):
            self.append(*row)

    def snapshot(self) -> Worldline:
        # views are safe: later appends only write past index n
        n = self.n
        return Worldline(self._tau[:n], self._y[:n], self._u[:n], self._du[:n], check=False)
