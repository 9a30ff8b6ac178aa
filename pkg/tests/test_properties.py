"""Property-based checks with hypothesis-drawn inputs."""
import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from poincare_gravity.algebra import AntisymTensor, PoincareParameter, commutator
from poincare_gravity.checks import covariance_residual, decomposition_residual, jacobi_residual
from poincare_gravity.constants import mdot
from poincare_gravity.retarded import retarded_time
from poincare_gravity.units import convert_units
from poincare_gravity.worldline import Worldline

finite = st.floats(-10.0, 10.0, allow_nan=False, allow_infinity=False)
vec4 = arrays(np.float64, 4, elements=finite)
six = st.tuples(*[finite] * 6)
lams = st.floats(0.1, 10.0)
seeds = st.integers(0, 2 ** 32 - 1)

CIRCLE = Worldline.circular(2.0, 0.5, (-400.0, 400.0), 8001)


@st.composite
def parameters(draw):
    return PoincareParameter(draw(vec4), AntisymTensor(draw(six)))


@given(parameters(), parameters(), lams)
def test_commutator_antisymmetric(p1, p2, lam):
    a, b = commutator(p1, p2, lam), commutator(p2, p1, lam)
    scale = max(1.0, np.abs(a.epsilon).max(), np.abs(a.omega.matrix()).max())
    assert np.abs(a.epsilon + b.epsilon).max() <= 1e-12 * scale
    assert np.abs(a.omega.matrix() + b.omega.matrix()).max() <= 1e-12 * scale


@given(parameters(), lams)
def test_self_commutator_vanishes(p, lam):
    c = commutator(p, p, lam)
    assert not c.epsilon.any() and not c.omega.matrix().any()


@settings(max_examples=50)
@given(seeds)
def test_jacobi_random_seed(seed):
    assert jacobi_residual(np.random.default_rng(seed)) < 1e-12


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_covariance_random_seed(seed):
    assert covariance_residual(np.random.default_rng(seed)) < 1e-6


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_decomposition_random_seed(seed):
    assert decomposition_residual(np.random.default_rng(seed)) < 1e-12


@given(st.floats(-50.0, 50.0), arrays(np.float64, 3, elements=st.floats(-40.0, 40.0)))
def test_retarded_point_is_on_light_cone(t, xs):
    y_now = CIRCLE.at_coordinate_time(t)[1]
    if np.linalg.norm(xs - y_now[1:]) < 0.5:
        return
    x = np.concatenate([[t], xs])
    rp = retarded_time(x, CIRCLE)
    R = x - rp.y_plus
    assert abs(mdot(R, R)) <= 1e-9 * max(1.0, R[0] ** 2)
    assert R[0] > 0


@given(st.floats(1e-30, 1e30), st.sampled_from(["mass", "time", "power", "energy", "velocity"]))
def test_unit_round_trip(x, dim):
    back = convert_units(convert_units(x, dim), dim, "to_si")
    assert abs(back - x) <= 1e-14 * x
