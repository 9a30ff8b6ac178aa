import math

import numpy as np
import pytest
from scipy.optimize import bisect

from poincare_gravity.algebra import AntisymTensor, GaugeFieldConfiguration, PoincareGaugeField, field_strengths
from poincare_gravity.constants import DEFAULT, ETA, Constants
from poincare_gravity.retarded import (FieldProvider, NotCovered, RetardedPoint, Singular, SourceParticle,
                                       field_strengths_at, lienard_wiechert, linearized_residual,
                                       nonlinear_residual, retarded_time)
from poincare_gravity.worldline import Worldline, WorldlineBuilder, WorldlineError

FOUR_PI = 4.0 * math.pi


def test_static_retarded_time_is_light_travel():
    w = Worldline.static((0.0, 0.0, 0.0))
    rp = retarded_time([5.0, 3.0, 4.0, 0.0], w)
    assert rp.y_plus[0] == pytest.approx(0.0, abs=1e-12)
    assert rp.r == pytest.approx(5.0)


@pytest.mark.parametrize("v,t,x,rho", [(0.5, 3.0, 2.0, 1.0), (0.9, 10.0, -4.0, 0.5), (0.2, 0.0, 7.0, 0.0)])
@pytest.mark.parametrize("method", ["newton", "brentq", "bisect"])
def test_uniform_retarded_time_closed_form(v, t, x, rho, method):
    w = Worldline.uniform((v, 0.0, 0.0), tau_range=(-100.0, 100.0))
    rp = retarded_time([t, x, rho, 0.0], w, method=method)
    # (t - t_r)^2 = (x - v t_r)^2 + rho^2, smaller root
    a, b, c = 1.0 - v * v, -2.0 * (t - v * x), t * t - x * x - rho * rho
    closed = (-b - math.sqrt(b * b - 4 * a * c)) / (2 * a)
    brute = bisect(lambda tr: (t - tr) - math.hypot(x - v * tr, rho), -200.0, t, xtol=1e-14)
    assert rp.y_plus[0] == pytest.approx(closed, abs=1e-10)
    assert closed == pytest.approx(brute, abs=1e-10)


def test_on_worldline_is_singular():
    w = Worldline.static()
    with pytest.raises(Singular):
        retarded_time([1.0, 0.0, 0.0, 0.0], w)


def test_history_too_short():
    w = Worldline.static(tau_range=(-1.0, 1.0))
    with pytest.raises(NotCovered):
        retarded_time([0.0, 10.0, 0.0, 0.0], w)


def test_worldline_validation_and_builder():
    with pytest.raises(WorldlineError):
        Worldline([0.0, 0.0], np.zeros((2, 4)), np.tile([1.0, 0, 0, 0], (2, 1)))
    with pytest.raises(WorldlineError):
        Worldline([0.0, 1.0], np.zeros((2, 4)), np.tile([1.0, 1.0, 0, 0], (2, 1)))
    b = WorldlineBuilder(2)
    src = Worldline.uniform((0.3, 0.0, 0.0), n=5, tau_range=(0.0, 4.0))
    b.extend(src)
    snap = b.snapshot()
    assert len(snap) == 5
    y, u, _ = snap.state(2.5)
    assert np.allclose(y, src.state(2.5)[0]) and np.allclose(u, src.u[0])


def test_worldline_csv_round_trip(tmp_path):
    w = Worldline.circular(1.0, 0.3, (0.0, 10.0), 101)
    w.to_csv(tmp_path / "w.csv")
    back = Worldline.from_csv(tmp_path / "w.csv")
    assert np.array_equal(back.y, w.y) and np.array_equal(back.u, w.u)


def test_circular_interpolation_accuracy():
    w = Worldline.circular(1.0, 0.3, (0.0, 50.0), 2001)
    gamma = 1.0 / math.sqrt(1.0 - 0.09)
    om = 0.3 / 1.0
    for tau in (0.123, 17.77, 42.0):
        y, u, _ = w.state(tau)
        t = gamma * tau
        assert np.allclose(y[1:3], [math.cos(om * t), math.sin(om * t)], atol=1e-9)
        assert -u @ ETA @ u == pytest.approx(1.0, abs=1e-9)


def test_static_potential():
    m, r = 2.0, 3.0
    src = SourceParticle(m, Worldline.static())
    A = lienard_wiechert([5.0, 0.0, r, 0.0], src)
    expected = np.zeros((4, 4))
    expected[0, 0] = -m / (FOUR_PI * r)
    assert np.allclose(A.a, expected, atol=1e-15)
    assert not A.b.any()


def test_static_rotational_potential():
    mu, r = 0.4, 2.0
    src = SourceParticle(1.0, Worldline.static(), p_grav=np.zeros(4),
                         m_grav=AntisymTensor((0, 0, 0, mu, 0, 0)), identification_mode="frozen")
    A = lienard_wiechert([4.0, r, 0.0, 0.0], src)
    assert A.b[0, 1, 2] == pytest.approx(mu / (2 * FOUR_PI * r))
    mask = np.ones((4, 4, 4), bool)
    mask[0, 1, 2] = mask[0, 2, 1] = False
    assert not A.b[mask].any()
    assert not A.a.any()


def test_static_field_strength_coulomb():
    m = 1.5
    src = SourceParticle(m, Worldline.static())
    rv = np.array([1.0, -2.0, 2.0])
    em = field_strengths_at(np.concatenate([[10.0], rv]), src)
    r = np.linalg.norm(rv)
    expected = -(DEFAULT.g / FOUR_PI) * m * rv / r ** 3
    assert np.allclose(em.d[:, 0], expected)
    assert np.allclose(em.d[:, 1:], 0.0) and np.allclose(em.h, 0.0)


def test_acceleration_term_magnitude():
    m, a, r = 1.0, 0.3, 1e6
    n = np.array([1.0, 0.0, 0.0])
    acc = np.array([0.0, a, 0.0])
    x = np.array([r, r, 0.0, 0.0])
    src = SourceParticle(m, Worldline.static(), identification_mode="frozen", p_grav=np.array([m, 0, 0, 0]),
                         m_grav=AntisymTensor())
    rp = RetardedPoint(0.0, np.zeros(4), np.array([1.0, 0, 0, 0]), np.concatenate([[0.0], acc]),
                       r * n, r, np.zeros(3))
    em = field_strengths_at(x, src, rp=rp)
    coulomb = -(DEFAULT.g / FOUR_PI) * m * n / r ** 2
    rad = em.d[:, 0] - coulomb
    assert np.linalg.norm(rad) == pytest.approx(DEFAULT.g / FOUR_PI * m * a / r, rel=1e-12)
    # magnetic part is n x d for every inner component
    assert np.allclose(em.h, np.cross(n, em.d, axis=0), atol=1e-20)


def test_wave_zone_falloff():
    w = Worldline.circular(1.0, 0.3, (-3000.0, 100.0), 30001)
    src = SourceParticle(1.0, w, identification_mode="frozen")
    # on the orbit axis the radiation amplitude does not depend on the orbital phase
    far = [np.linalg.norm(field_strengths_at(np.array([0.0, 0.0, 0.0, R]), src).d[:, 0]) * R
           for R in (500.0, 1000.0, 2000.0)]
    assert far[1] == pytest.approx(far[0], rel=1e-2)
    assert far[2] == pytest.approx(far[1], rel=1e-2)


def test_linearized_residual_static_and_non_solution():
    src = SourceParticle(1.0, Worldline.static())
    prov = FieldProvider([src])
    cfg = GaugeFieldConfiguration(prov.potential)
    ra, rb = linearized_residual(cfg, [1.0, 2.0, 1.0, -1.0], src)
    assert np.max(np.abs(ra)) < 1e-8 and np.max(np.abs(rb)) == 0.0

    def quad(x):
        x2 = x @ ETA @ x
        return PoincareGaugeField(np.full((4, 4), x2), np.zeros((4, 4, 4)))

    ra, _ = linearized_residual(GaugeFieldConfiguration(quad, h_fd=0.1), [0.3, 0.1, 0.2, 0.4])
    # d^2 (eta_rs x^r x^s) = 2 eta^{mn} eta_{mn} = 8
    assert np.allclose(ra, 8.0, rtol=1e-9)


def test_nonlinear_residual_zero_and_linear_limit():
    zero = GaugeFieldConfiguration(lambda x: PoincareGaugeField.zero())
    ra, rb = nonlinear_residual(zero, np.ones(4))
    assert not ra.any() and not rb.any()

    src = SourceParticle(1.0, Worldline.static())
    cfg = GaugeFieldConfiguration(FieldProvider([src]).potential)
    x = np.array([0.5, 2.0, 1.0, 1.0])
    ra, _ = nonlinear_residual(cfg, x, Constants(g=0.0), h=1e-2)
    la, _ = linearized_residual(cfg, x, src)
    # Lorenz gauge: the divergence of f equals the wave operator on a
    assert np.allclose(ra, la, atol=1e-7)


def test_nonlinear_residual_bilinear_terms_by_hand():
    # source with both charges: a and b nonzero; divergence taken by independent differences
    src = SourceParticle(1.0, Worldline.static(), p_grav=np.array([1.0, 0, 0, 0]),
                         m_grav=AntisymTensor((0.3, 0, 0, 0.5, 0, 0)), identification_mode="frozen")
    const = DEFAULT
    g, lam = const.g, const.lam
    prov = FieldProvider([src])
    cfg = GaugeFieldConfiguration(lambda p: prov.potential(p).scaled(g), h_fd=1e-4)
    x = np.array([0.0, 2.0, 0.5, -0.3])
    ra, rb = nonlinear_residual(cfg, x, const, h=1e-3)

    F0 = field_strengths(cfg, x, lam, coupling=g)
    fld = cfg(x)
    eta = np.diag([-1.0, 1, 1, 1])
    hs = 1e-3
    div_f = np.zeros((4, 4))
    div_h = np.zeros((4, 4, 4))
    for m in range(4):
        e = np.zeros(4)
        e[m] = hs
        Fs = [field_strengths(cfg, x + k * e, lam, g) for k in (-2, -1, 1, 2)]
        div_f += eta[m, m] * (Fs[0].f[m] - 8 * Fs[1].f[m] + 8 * Fs[2].f[m] - Fs[3].f[m]) / (12 * hs)
        div_h += eta[m, m] * (Fs[0].h[m] - 8 * Fs[1].h[m] + 8 * Fs[2].h[m] - Fs[3].h[m]) / (12 * hs)
    hm = F0.h * np.array([-1.0, 1, 1, 1])          # h_{mn}^a_b
    bm = fld.b * np.array([-1.0, 1, 1, 1])         # b_m^a_b
    exp_a = div_f.copy()
    exp_b = div_h * np.array([-1.0, 1, 1, 1])
    term_scale = 0.0
    for n in range(4):
        for al in range(4):
            for m in range(4):
                for be in range(4):
                    t1 = g / lam * eta[m, m] * fld.a[m, be] * hm[m, n, al, be]
                    t2 = g / lam * eta[m, m] * bm[m, al, be] * F0.f[m, n, be]
                    exp_a[n, al] += t1 - t2
                    term_scale = max(term_scale, abs(t1), abs(t2))
                    for c in range(4):
                        exp_b[n, al, be] += g / lam * eta[m, m] * (hm[m, n, al, c] * bm[m, c, be]
                                                                   - bm[m, al, c] * hm[m, n, c, be])
    # the individual bilinear terms are far from zero even where their sum cancels
    assert term_scale > 1e-4
    assert np.max(np.abs(ra - exp_a)) < 1e-6 * term_scale
    # rb is returned with both inner indices up; compare in mixed form
    assert np.max(np.abs(rb * np.array([-1.0, 1, 1, 1]) - exp_b)) < 1e-6 * term_scale
