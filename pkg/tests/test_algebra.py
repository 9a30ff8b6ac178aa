import numpy as np
import pytest

from poincare_gravity.algebra import (AlgebraError, AntisymTensor, FieldStrengths, FourVector,
                                      GaugeFieldConfiguration, PoincareGaugeField, PoincareParameter,
                                      commutator, electric_magnetic, field_strengths,
                                      gauge_transform_fields, gauge_transform_strengths,
                                      reconstruct_full_strength, strengths_from_em)
from poincare_gravity.constants import ETA

rng = np.random.default_rng(7)


def rand_antisym(shape=()):
    m = rng.normal(size=shape + (4, 4))
    return m - np.swapaxes(m, -1, -2)


def const_cfg(a, b):
    fld = PoincareGaugeField(a, b)
    zero = PoincareGaugeField.zero()
    return GaugeFieldConfiguration(lambda x: fld, lambda x, mu: zero)


def test_fourvector_lower_and_dot():
    v = FourVector([2.0, 1.0, 0.0, 0.0])
    assert np.allclose(v.lower().components, [-2.0, 1.0, 0.0, 0.0])
    assert v.dot(v) == pytest.approx(-3.0)
    with pytest.raises(AlgebraError):
        FourVector([1.0, 2.0])


def test_antisym_storage():
    t = AntisymTensor((1, 2, 3, 4, 5, 6))
    m = t.matrix()
    assert np.array_equal(m, -m.T)
    assert t[0, 1] == 1.0 and t[1, 0] == -1.0 and t[2, 3] == 6.0
    assert AntisymTensor.from_matrix(m) == t
    # lowering flips the sign of the 0i block only
    low = t.lower()
    assert low[0, 1] == -1.0 and low[1, 2] == 4.0
    with pytest.raises(AlgebraError):
        AntisymTensor.from_matrix(np.eye(4))


def test_commutator_translations_commute():
    p = commutator(PoincareParameter([1, 0, 0, 0]), PoincareParameter([0, 1, 0, 0]))
    assert np.all(p.epsilon == 0) and np.all(p.omega.matrix() == 0)


@pytest.mark.parametrize("lam", [1.0, 2.5])
def test_commutator_boost_translation(lam):
    # omega_{01} = lam (lower) is omega^{01} = -lam
    boost = PoincareParameter(omega=AntisymTensor.from_matrix(_lower_to_upper(0, 1, lam)))
    p = commutator(boost, PoincareParameter([0, 1, 0, 0]), lam)
    # hand expansion: E1 = omega X / lam, E2 = e_1, [E1, E2] = -(omega e_1)/lam = (1, 0, 0, 0)
    assert np.allclose(p.epsilon, [1.0, 0.0, 0.0, 0.0], atol=1e-15)
    assert np.allclose(p.omega.matrix(), 0.0)


def _lower_to_upper(i, j, val):
    low = np.zeros((4, 4))
    low[i, j], low[j, i] = val, -val
    return ETA @ low @ ETA


def test_commutator_rotations_close_on_13_plane():
    r12 = AntisymTensor((0, 0, 0, 1.0, 0, 0))
    r23 = AntisymTensor((0, 0, 0, 0, 0, 1.0))
    p = commutator(PoincareParameter(omega=r12), PoincareParameter(omega=r23))
    m = p.omega.matrix()
    mask = np.ones((4, 4), bool)
    mask[1, 3] = mask[3, 1] = False
    assert np.all(m[mask] == 0) and abs(m[1, 3]) == pytest.approx(1.0)
    # explicit matrix commutator of the generators (mixed form), raised back
    g1, g2 = r12.matrix() @ ETA, r23.matrix() @ ETA
    expected = (g2 @ g1 - g1 @ g2) @ ETA
    assert np.allclose(m, expected)


def test_commutator_antisymmetric_in_arguments():
    p1 = PoincareParameter(rng.normal(size=4), AntisymTensor(tuple(rng.normal(size=6))))
    p2 = PoincareParameter(rng.normal(size=4), AntisymTensor(tuple(rng.normal(size=6))))
    a, b = commutator(p1, p2, 1.3), commutator(p2, p1, 1.3)
    assert np.allclose(a.epsilon, -b.epsilon)
    assert np.allclose(a.omega.matrix(), -b.omega.matrix())


def test_pure_gauge_has_zero_strength():
    c = rng.normal(size=(4, 4))          # eps^a(x) = c[r, a] x^r + x.x e^a -> symmetric second derivatives
    e = rng.normal(size=4)

    def val(x):
        return PoincareGaugeField(c + 2.0 * np.outer(x, e), np.zeros((4, 4, 4)))

    cfg = GaugeFieldConfiguration(val)
    F = field_strengths(cfg, rng.normal(size=4))
    assert np.max(np.abs(F.f)) < 1e-9 and np.max(np.abs(F.h)) == 0.0


def test_zero_fields_zero_strengths():
    F = field_strengths(const_cfg(np.zeros((4, 4)), np.zeros((4, 4, 4))), np.zeros(4))
    assert not F.f.any() and not F.h.any()


def test_constant_fields_strengths_by_hand():
    lam = 1.7
    a = rng.normal(size=(4, 4))
    b = rand_antisym((4,))
    F = field_strengths(const_cfg(a, b), np.zeros(4), lam)
    bm = b * np.array([-1.0, 1, 1, 1])    # b_mu^a_b
    f = np.zeros((4, 4, 4))
    h = np.zeros((4, 4, 4, 4))
    for m in range(4):
        for n in range(4):
            for al in range(4):
                f[m, n, al] = sum(bm[n, al, be] * a[m, be] - bm[m, al, be] * a[n, be] for be in range(4)) / lam
                for be in range(4):
                    h[m, n, al, be] = sum(bm[n, al, g] * bm[m, g, be] - bm[m, al, g] * bm[n, g, be]
                                          for g in range(4)) / lam
    assert np.allclose(F.f, f, atol=1e-13)
    assert np.allclose(F.h_mixed, h, atol=1e-13)


def test_gauge_transform_fields_examples():
    zero_d = [PoincareParameter()] * 4
    p = PoincareParameter(rng.normal(size=4), AntisymTensor(tuple(rng.normal(size=6))))
    d = gauge_transform_fields(PoincareGaugeField.zero(), zero_d, p)
    assert not d.a.any() and not d.b.any()

    dps = [PoincareParameter(rng.normal(size=4), AntisymTensor(tuple(rng.normal(size=6)))) for _ in range(4)]
    d = gauge_transform_fields(PoincareGaugeField.zero(), dps, p)
    assert np.allclose(d.a, [q.epsilon for q in dps])
    assert np.allclose(d.b, [q.omega.matrix() for q in dps])

    lam = 0.8
    a = rng.normal(size=(4, 4))
    w = PoincareParameter(omega=AntisymTensor(tuple(rng.normal(size=6))))
    d = gauge_transform_fields(PoincareGaugeField(a, np.zeros((4, 4, 4))), zero_d, w, lam)
    W = w.omega.matrix() @ ETA
    expected = np.array([[sum(W[al, be] * a[m, be] for be in range(4)) / lam for al in range(4)]
                         for m in range(4)])
    assert np.allclose(d.a, expected) and np.allclose(d.b, 0.0)


def test_gauge_transform_strengths_examples():
    F = FieldStrengths(_antisym_f(), _antisym_h())
    d = gauge_transform_strengths(F, PoincareParameter())
    assert not d.f.any() and not d.h.any()

    F0 = FieldStrengths(_antisym_f(), np.zeros((4, 4, 4, 4)))
    w = PoincareParameter(omega=AntisymTensor(tuple(rng.normal(size=6))))
    assert not gauge_transform_strengths(F0, w).h.any()

    lam = 1.3
    F1 = FieldStrengths(np.zeros((4, 4, 4)), _antisym_h())
    eps = rng.normal(size=4)
    d = gauge_transform_strengths(F1, PoincareParameter(eps), lam)
    hm = F1.h_mixed
    expected = -np.einsum("mnab,b->mna", hm, eps) / lam
    assert np.allclose(d.f, expected)


def _antisym_f():
    f = rng.normal(size=(4, 4, 4))
    return f - np.swapaxes(f, 0, 1)


def _antisym_h():
    h = rng.normal(size=(4, 4, 4, 4))
    h = h - np.swapaxes(h, 0, 1)
    return h - np.swapaxes(h, 2, 3)


def test_reconstruct_examples():
    F = FieldStrengths(_antisym_f(), _antisym_h())
    assert np.array_equal(reconstruct_full_strength(F, np.zeros(4)), F.f)
    F0 = FieldStrengths(F.f, np.zeros((4, 4, 4, 4)))
    assert np.array_equal(reconstruct_full_strength(F0, rng.normal(size=4)), F.f)

    lam, c = 2.0, 0.7
    h = np.zeros((4, 4, 4, 4))
    for (m, n, s1) in ((0, 1, 1), (1, 0, -1)):
        h[m, n, 0, 1], h[m, n, 1, 0] = s1 * c, -s1 * c
    F = FieldStrengths(np.zeros((4, 4, 4)), h)
    out = reconstruct_full_strength(F, [0.0, lam, 0.0, 0.0], lam)
    # h_{01}^0_1 = h_{01}^{01} eta_{11} = c, times X^1 / lam = 1
    assert out[0, 1, 0] == pytest.approx(c)
    assert out[1, 0, 0] == pytest.approx(-c)
    # F^1 would need h_{01}^1_0 X^0, and X^0 = 0
    assert out[0, 1, 1] == 0.0


def test_electric_magnetic_round_trip():
    f = _antisym_f()
    d, h = electric_magnetic(f)
    assert np.allclose(strengths_from_em(d, h), f)


def test_strengths_reject_non_antisymmetric():
    with pytest.raises(AlgebraError):
        FieldStrengths(rng.normal(size=(4, 4, 4)), np.zeros((4, 4, 4, 4)))
