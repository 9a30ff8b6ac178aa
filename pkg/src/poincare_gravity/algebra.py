"""Poincare parameters, gauge fields and field strengths.

Index layout of stored arrays (inner indices always contravariant,
spacetime indices where the field equations put them):

    epsilon[a]          eps^a
    omega               AntisymTensor holding omega^{ab}
    a[m, a]             a_m^a
    b[m, a, b]          b_m^{ab}
    f[m, n, a]          f_{mn}^a
    h[m, n, a, b]       h_{mn}^{ab}

Mixed inner tensors (omega^a_b, b_m^a_b, ...) are formed on the fly by
right-multiplying with ETA. ``lam`` is the inner length scale; every
formula below carries the explicit 1/lam of the reduced theory.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .constants import ETA, SIG

PAIRS = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))

_IU = tuple(np.array(PAIRS).T)
_IL = _IU[::-1]

LEVI3 = np.zeros((3, 3, 3))
for _i, _j, _k in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
    LEVI3[_i, _j, _k] = 1.0
    LEVI3[_i, _k, _j] = -1.0


class AlgebraError(ValueError):
    pass


@dataclass(frozen=True)
class FourVector:
    components: np.ndarray
    index: str = "upper"
    units: str = "length"

    def __post_init__(self):
        c = np.asarray(self.components, dtype=float)
        if c.shape != (4,):
            raise AlgebraError(f"four-vector needs 4 components, got shape {c.shape}")
        if self.index not in ("upper", "lower"):
            raise AlgebraError(f"index position must be 'upper' or 'lower', not {self.index!r}")
        object.__setattr__(self, "components", c)

    def lower(self) -> FourVector:
        if self.index == "lower":
            return self
        return FourVector(SIG * self.components, "lower", self.units)

    def raise_(self) -> FourVector:
        if self.index == "upper":
            return self
        return FourVector(SIG * self.components, "upper", self.units)

    def dot(self, other: FourVector) -> float:
        u = self.raise_().components
        v = other.lower().components
        return float(u @ v)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.components, dtype=dtype)


@dataclass(frozen=True)
class AntisymTensor:
    """Antisymmetric 4x4 tensor kept as its six independent entries.

    Component order is m01, m02, m03, m12, m13, m23 with both indices in
    the position given by ``index``.
    """

    comps: tuple = (0.0,) * 6
    index: str = "upper"
    units: str = "length"

    def __post_init__(self):
        c = tuple(float(v) for v in self.comps)
        if len(c) != 6:
            raise AlgebraError(f"antisymmetric tensor needs 6 components, got {len(c)}")
        object.__setattr__(self, "comps", c)
        m = np.zeros((4, 4))
        m[_IU] = c
        m[_IL] = [-v for v in c]
        m.setflags(write=False)
        object.__setattr__(self, "_m", m)

    @classmethod
    def from_matrix(cls, m, index: str = "upper", units: str = "length", atol: float = 0.0):
        m = np.asarray(m, dtype=float)
        if m.shape != (4, 4):
            raise AlgebraError(f"expected 4x4 matrix, got {m.shape}")
        if np.max(np.abs(m + m.T)) > atol:
            raise AlgebraError("matrix is not antisymmetric")
        return cls(tuple(m[_IU].tolist()), index, units)

    @classmethod
    def zero(cls) -> AntisymTensor:
        return cls()

    def matrix(self) -> np.ndarray:
        return self._m.copy()

    def lower(self) -> AntisymTensor:
        if self.index == "lower":
            return self
        return AntisymTensor.from_matrix(ETA @ self.matrix() @ ETA, "lower", self.units)

    def raise_(self) -> AntisymTensor:
        if self.index == "upper":
            return self
        return AntisymTensor.from_matrix(ETA @ self.matrix() @ ETA, "upper", self.units)

    def __getitem__(self, ij):
        i, j = ij
        return float(self._m[i, j])


def _antisym_check(arr: np.ndarray, axes: tuple[int, int], what: str):
    swapped = np.swapaxes(arr, *axes)
    if not np.array_equal(arr, -swapped):
        raise AlgebraError(f"{what} is not antisymmetric in axes {axes}")


@dataclass(frozen=True)
class PoincareParameter:
    epsilon: np.ndarray = field(default_factory=lambda: np.zeros(4))
    omega: AntisymTensor = field(default_factory=AntisymTensor)

    def __post_init__(self):
        eps = np.asarray(self.epsilon, dtype=float)
        if eps.shape != (4,) or not np.all(np.isfinite(eps)):
            raise AlgebraError("epsilon must be 4 finite reals")
        if not np.all(np.isfinite(self.omega.comps)):
            raise AlgebraError("omega must be finite")
        if self.omega.index != "upper":
            object.__setattr__(self, "omega", self.omega.raise_())
        object.__setattr__(self, "epsilon", eps)

    @property
    def omega_mixed(self) -> np.ndarray:
        """omega^a_b as a matrix."""
        return self.omega._m * SIG

    def inner_field(self, X, lam: float = 1.0) -> np.ndarray:
        """Inner vector field E^a(X) = eps^a + omega^a_b X^b / lam."""
        return self.epsilon + self.omega_mixed @ np.asarray(X, dtype=float) / lam


@dataclass(frozen=True)
class PoincareGaugeField:
    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.a, dtype=float)
        b = np.asarray(self.b, dtype=float)
        if a.shape != (4, 4) or b.shape != (4, 4, 4):
            raise AlgebraError(f"bad gauge field shapes {a.shape}, {b.shape}")
        if np.abs(b + np.swapaxes(b, 1, 2)).max() > 1e-12 * max(1.0, np.abs(b).max()):
            raise AlgebraError("b_m^{ab} must be antisymmetric in ab")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @classmethod
    def _trusted(cls, a: np.ndarray, b: np.ndarray) -> PoincareGaugeField:
        # internal results built from already-validated fields by sums and
        # scalings, which preserve exact antisymmetry
        obj = object.__new__(cls)
        object.__setattr__(obj, "a", a)
        object.__setattr__(obj, "b", b)
        return obj

    @classmethod
    def zero(cls) -> PoincareGaugeField:
        return cls(np.zeros((4, 4)), np.zeros((4, 4, 4)))

    @property
    def b_mixed(self) -> np.ndarray:
        return self.b * SIG

    def __add__(self, other: PoincareGaugeField) -> PoincareGaugeField:
        return PoincareGaugeField._trusted(self.a + other.a, self.b + other.b)

    def scaled(self, s: float) -> PoincareGaugeField:
        return PoincareGaugeField._trusted(s * self.a, s * self.b)


def _inner_antisym(h: np.ndarray) -> np.ndarray:
    # removes round-off asymmetry in the inner pair; spacetime antisymmetry is kept exactly
    return 0.5 * (h - np.swapaxes(h, 2, 3))


def _fill_antisym(upper: Callable[[int, int], np.ndarray], tail: tuple) -> np.ndarray:
    out = np.zeros((4, 4) + tail)
    for m, n in PAIRS:
        v = upper(m, n)
        out[m, n] = v
        out[n, m] = -v
    return out


@dataclass(frozen=True)
class FieldStrengths:
    f: np.ndarray
    h: np.ndarray

    def __post_init__(self):
        f = np.asarray(self.f, dtype=float)
        h = np.asarray(self.h, dtype=float)
        if f.shape != (4, 4, 4) or h.shape != (4, 4, 4, 4):
            raise AlgebraError(f"bad field strength shapes {f.shape}, {h.shape}")
        _antisym_check(f, (0, 1), "f")
        _antisym_check(h, (0, 1), "h")
        object.__setattr__(self, "f", f)
        object.__setattr__(self, "h", h)

    @classmethod
    def zero(cls) -> FieldStrengths:
        return cls(np.zeros((4, 4, 4)), np.zeros((4, 4, 4, 4)))

    @classmethod
    def from_pairs(cls, f_pair, h_pair) -> FieldStrengths:
        """Build from values on the six ordered pairs m < n (order of PAIRS)."""
        f_pair = np.asarray(f_pair, dtype=float)
        h_pair = np.asarray(h_pair, dtype=float)
        idx = {p: k for k, p in enumerate(PAIRS)}
        return cls(_fill_antisym(lambda m, n: f_pair[idx[m, n]], (4,)),
                   _fill_antisym(lambda m, n: h_pair[idx[m, n]], (4, 4)))

    @property
    def h_mixed(self) -> np.ndarray:
        return self.h * SIG

    def __add__(self, other: FieldStrengths) -> FieldStrengths:
        return FieldStrengths(self.f + other.f, self.h + other.h)


class GaugeFieldConfiguration:
    """Spacetime-dependent gauge field with first derivatives.

    ``derivative(x, mu)`` uses the analytic override when one is given,
    otherwise a fourth-order central difference with step ``h_fd``.
    """

    def __init__(self, evaluate: Callable[[np.ndarray], PoincareGaugeField],
                 derivative: Optional[Callable[[np.ndarray, int], PoincareGaugeField]] = None,
                 h_fd: float = 1e-4):
        self.evaluate = evaluate
        self._analytic = derivative
        self.h_fd = h_fd

    def __call__(self, x) -> PoincareGaugeField:
        return self.evaluate(np.asarray(x, dtype=float))

    def fd_derivative(self, x, mu: int) -> PoincareGaugeField:
        x = np.asarray(x, dtype=float)
        h = self.h_fd
        e = np.zeros(4)
        e[mu] = h
        p1, m1 = self.evaluate(x + e), self.evaluate(x - e)
        p2, m2 = self.evaluate(x + 2 * e), self.evaluate(x - 2 * e)
        a = (8.0 * (p1.a - m1.a) - (p2.a - m2.a)) / (12.0 * h)
        b = (8.0 * (p1.b - m1.b) - (p2.b - m2.b)) / (12.0 * h)
        return PoincareGaugeField._trusted(a, b)

    def derivative(self, x, mu: int) -> PoincareGaugeField:
        if self._analytic is not None:
            return self._analytic(np.asarray(x, dtype=float), mu)
        return self.fd_derivative(x, mu)

    def gradients(self, x) -> tuple[np.ndarray, np.ndarray]:
        """(da, db) with da[r, m, a] = d_r a_m^a and db[r, m, a, b] = d_r b_m^{ab}."""
        ds = [self.derivative(x, r) for r in range(4)]
        return np.array([d.a for d in ds]), np.array([d.b for d in ds])


def commutator(p1: PoincareParameter, p2: PoincareParameter, lam: float = 1.0) -> PoincareParameter:
    """Parameter of the vector-field bracket [E1 . nabla, E2 . nabla].

    With E_i = eps_i + omega_i X / lam the bracket
    (E1 . nabla E2 - E2 . nabla E1) is again of that form with
    eps3 = (omega2 eps1 - omega1 eps2) / lam and
    omega3 = (omega2 omega1 - omega1 omega2) / lam (mixed-index products).
    """
    w1, w2 = p1.omega_mixed, p2.omega_mixed
    eps3 = (w2 @ p1.epsilon - w1 @ p2.epsilon) / lam
    w3 = (w2 @ w1 - w1 @ w2) / lam
    # back to omega^{ab}; antisymmetry of the upper form is exact up to rounding
    up = w3 @ ETA
    up = 0.5 * (up - up.T)
    return PoincareParameter(eps3, AntisymTensor.from_matrix(up))


def field_strengths(cfg: GaugeFieldConfiguration, x, lam: float = 1.0,
                    coupling: float = 1.0) -> FieldStrengths:
    """f and h at event x from the potentials and their derivatives.

    ``coupling`` multiplies the bilinear terms; 1 reproduces the reduced
    strengths as written, ``g`` gives the strengths of the g-rescaled
    potentials entering the coupled field equations.
    """
    fld = cfg(x)
    da, db = cfg.gradients(x)
    a = fld.a
    B = fld.b_mixed
    dB = db @ ETA
    k = coupling / lam
    # t[m, n] = d_m a_n + k B_n a_m; each strength is t[m, n] - t[n, m]
    tf = da + k * np.transpose(B @ a.T, (2, 0, 1))
    th = dB + k * (B[None] @ B[:, None])
    f = tf - np.swapaxes(tf, 0, 1)
    h = (th - np.swapaxes(th, 0, 1)) * SIG
    return FieldStrengths(f, _inner_antisym(h))


def gauge_transform_fields(fld: PoincareGaugeField, d_param: Sequence[PoincareParameter],
                           param: PoincareParameter, lam: float = 1.0) -> PoincareGaugeField:
    """Infinitesimal variation (delta a, delta b) of the Poincare fields.

    ``d_param[mu]`` holds the derivatives d_mu eps and d_mu omega.
    """
    if len(d_param) != 4:
        raise AlgebraError("need one parameter derivative per spacetime direction")
    W = param.omega_mixed
    B = fld.b_mixed
    d_eps = np.array([d.epsilon for d in d_param])
    d_W = np.array([d.omega._m for d in d_param]) * SIG
    da = d_eps + (fld.a @ W.T - B @ param.epsilon) / lam
    dB = d_W + (W @ B - B @ W) / lam
    db = dB @ ETA
    db = 0.5 * (db - np.swapaxes(db, 1, 2))
    return PoincareGaugeField._trusted(da, db)


def gauge_transform_strengths(F: FieldStrengths, param: PoincareParameter,
                              lam: float = 1.0) -> FieldStrengths:
    """Homogeneous variation of f and h under a local Poincare transformation."""
    W = param.omega_mixed
    H = F.h_mixed
    eps = param.epsilon

    df = (np.einsum("ab,mnb->mna", W, F.f) - H @ eps) / lam
    dh = (np.einsum("ac,mncb->mnab", W, H) - H @ W) / lam * SIG
    return FieldStrengths(df, _inner_antisym(dh))


def reconstruct_full_strength(F: FieldStrengths, X, lam: float = 1.0) -> np.ndarray:
    """F_{mn}^a(X) = f_{mn}^a + h_{mn}^a_b X^b / lam, shape (4, 4, 4)."""
    X = np.asarray(X, dtype=float)
    return F.f + F.h_mixed @ X / lam


def sampled_full_strength(cfg: GaugeFieldConfiguration, x, X, lam: float = 1.0,
                          dX: float = 1.0) -> np.ndarray:
    """Full inner-space field strength at (x, X) straight from the commutator form.

    Builds A_m^a(x, X) = a_m^a + b_m^a_b X^b / lam and evaluates
    d_m A_n - d_n A_m + A_m^b nabla_b A_n^a - A_n^b nabla_b A_m^a, with the
    inner gradient taken by central differences in X (exact for the
    linear dependence, so independent of the coefficient formulas).
    ``X`` may be one inner point (4,) or a batch (k, 4).
    """
    x = np.asarray(x, dtype=float)
    X = np.asarray(X, dtype=float)
    fld = cfg(x)
    ds = [cfg.derivative(x, r) for r in range(4)]
    Xs = np.atleast_2d(X)
    k = len(Xs)

    def A(a, Bm, Xb):
        # a[..., n, a] + Bm[..., n, a, c] Xb[j, c] / lam -> [j, ..., n, a]
        return a + np.moveaxis(Bm @ Xb.T, -1, 0) / lam

    dA = A(np.array([d.a for d in ds]), np.array([d.b_mixed for d in ds]), Xs)  # [j, r, n, a]
    Ax = A(fld.a, fld.b_mixed, Xs)                                                # [j, n, a]
    steps = dX * np.eye(4)
    Xp = (Xs[:, None, :] + steps).reshape(-1, 4)
    Xm = (Xs[:, None, :] - steps).reshape(-1, 4)
    diff = (A(fld.a, fld.b_mixed, Xp) - A(fld.a, fld.b_mixed, Xm)) / (2.0 * dX)
    grad = np.moveaxis(diff.reshape(k, 4, 4, 4), 1, 3)                           # [j, n, a, b]
    # out[m, n, a] = dA[m, n, a] - dA[n, m, a] + grad[n, a, b] Ax[m, b] - grad[m, a, b] Ax[n, b]
    t = np.einsum("jnab,jmb->jmna", grad, Ax)
    out = dA - np.swapaxes(dA, 1, 2) + t - np.swapaxes(t, 1, 2)
    return out[0] if X.ndim == 1 else out


def electric_magnetic(f: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Split f_{mn}^{...} into (d, h) three-vectors.

    d^i = f^{i0}, h^i = -1/2 eps^{ijk} f_{jk}; any trailing inner indices
    are carried along, so the result has shape (3,) + f.shape[2:].
    """
    d = -f[1:, 0]  # f^{i0} = -f_{i0}
    hm = -0.5 * np.einsum("ijk,jk...->i...", LEVI3, f[1:, 1:])
    return d, hm


def strengths_from_em(d: np.ndarray, hm: np.ndarray) -> np.ndarray:
    """Inverse of :func:`electric_magnetic`: rebuild f_{mn}^{...} from (d, h)."""
    tail = d.shape[1:]
    f = np.zeros((4, 4) + tail)
    f[1:, 0] = -d
    f[0, 1:] = d
    f[1:, 1:] = -np.einsum("jki,i...->jk...", LEVI3, hm)
    return f
