import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ncps_dyn.algebra import (
    AuxOscillatorState,
    CanonicalState,
    ExtendedPoint,
    NCCouplings,
    PhaseFunction,
    a_index,
    bracket_function,
    eta_tensor,
    finite_difference_gradient,
    n_variables,
    p_index,
    pa_index,
    pb_index,
    poisson_bracket,
    represent,
    represent_functions,
    theta_tensor,
    verify_single_particle_algebra,
    x_index,
)
from ncps_dyn.errors import ValidationError

coord = st.floats(-2, 2, allow_nan=False)
vec3 = st.lists(coord, min_size=3, max_size=3).map(np.array)
coupling = st.floats(0, 1, allow_nan=False)


def aux(a=(0, 0, 0), pb=(0, 0, 0)):
    return AuxOscillatorState(np.array(a, float), np.zeros(3), np.zeros(3), np.array(pb, float))


def point_at(state, aux_state):
    return ExtendedPoint([state], aux_state)


# -- tensors ---------------------------------------------------------------

def test_theta_from_unit_aux_along_x3():
    theta = theta_tensor(NCCouplings(0.1, 0.0), aux(a=(0, 0, 1)))
    expected = np.zeros((3, 3))
    expected[0, 1], expected[1, 0] = 0.1, -0.1
    np.testing.assert_array_equal(theta, expected)


def test_theta_vanishes_without_coupling():
    assert not theta_tensor(NCCouplings(0.0, 0.0), aux(a=(1.3, -0.2, 0.7))).any()


def test_theta_diagonal_aux():
    theta = theta_tensor(NCCouplings(1.0, 0.0), aux(a=(1, 1, 1)))
    assert theta[0, 1] == theta[1, 2] == theta[2, 0] == 1.0


def test_eta_examples():
    assert eta_tensor(NCCouplings(0.0, 0.2), aux(pb=(0, 0, 1)))[0, 1] == pytest.approx(0.2)
    assert not eta_tensor(NCCouplings(0.0, 0.5), aux()).any()
    eta = eta_tensor(NCCouplings(0.0, 1.0), aux(pb=(1, 0, 0)))
    expected = np.zeros((3, 3))
    expected[1, 2], expected[2, 1] = 1.0, -1.0
    np.testing.assert_array_equal(eta, expected)


@given(vec3, vec3, coupling, coupling)
def test_tensors_are_antisymmetric(a, pb, ct, ce):
    c = NCCouplings(ct, ce)
    s = aux(a, pb)
    for t in (theta_tensor(c, s), eta_tensor(c, s)):
        np.testing.assert_array_equal(t, -t.T)


def test_negative_coupling_rejected():
    with pytest.raises(ValidationError):
        NCCouplings(-0.1, 0.0)


# -- representation --------------------------------------------------------

@given(vec3, vec3, vec3, vec3)
def test_represent_is_identity_without_coupling(x, p, a, pb):
    X, P = represent(CanonicalState(x, p), NCCouplings(0.0, 0.0), aux(a, pb))
    np.testing.assert_array_equal(X, x)
    np.testing.assert_array_equal(P, p)


def test_represent_theta_shift():
    X, P = represent(CanonicalState([1, 0, 0], [0, 1, 0]), NCCouplings(0.1, 0.0), aux(a=(0, 0, 1)))
    np.testing.assert_allclose(X, [0.95, 0, 0], atol=1e-15)
    np.testing.assert_allclose(P, [0, 1, 0], atol=1e-15)


def test_represent_eta_shift():
    X, P = represent(CanonicalState([0, 1, 0], [0, 0, 0]), NCCouplings(0.0, 0.2), aux(pb=(0, 0, 1)))
    np.testing.assert_allclose(P, [0.1, 0, 0], atol=1e-15)
    np.testing.assert_array_equal(X, [0, 1, 0])


@given(vec3, vec3, vec3, vec3, coupling, coupling)
@settings(max_examples=50)
def test_polynomial_representation_matches_numeric(x, p, a, pb, ct, ce):
    c = NCCouplings(ct, ce)
    state = CanonicalState(x, p)
    s = aux(a, pb)
    Xf, Pf = represent_functions(c)
    z = point_at(state, s).to_vector()
    X, P = represent(state, c, s)
    np.testing.assert_allclose([f(z) for f in Xf], X, atol=1e-14)
    np.testing.assert_allclose([f(z) for f in Pf], P, atol=1e-14)


# -- layout and brackets ---------------------------------------------------

def test_vector_layout_round_trip():
    rng = np.random.default_rng(1)
    point = ExtendedPoint.random(3, rng)
    z = point.to_vector()
    assert z.size == n_variables(3)
    back = ExtendedPoint.from_vector(z, 3)
    np.testing.assert_array_equal(back.to_vector(), z)
    assert z[x_index(2, 1)] == point.canon[2].x[1]
    assert z[p_index(1, 0)] == point.canon[1].p[0]
    assert z[a_index(3, 2)] == point.aux.a[2]
    assert z[pb_index(3, 0)] == point.aux.pb[0]


def test_canonical_pair_bracket_is_one():
    z = ExtendedPoint.random(1, np.random.default_rng(0)).to_vector()
    assert poisson_bracket(PhaseFunction.variable(x_index(0, 0)),
                           PhaseFunction.variable(p_index(0, 0)), z) == 1.0
    assert poisson_bracket(PhaseFunction.variable(pa_index(1, 0)),
                           PhaseFunction.variable(a_index(1, 0)), z) == -1.0


def test_x1_x2_bracket_is_theta12():
    c = NCCouplings(0.1, 0.0)
    X, _ = represent_functions(c)
    z = point_at(CanonicalState([0.3, -1.1, 0.4], [1.0, 0.2, -0.5]), aux(a=(0, 0, 1))).to_vector()
    assert poisson_bracket(X[0], X[1], z) == pytest.approx(0.1, abs=1e-15)


def test_mixed_bracket_hand_value():
    c = NCCouplings(0.1, 0.2)
    X, P = represent_functions(c)
    z = point_at(CanonicalState([0.7, 0.1, -0.3], [0.2, 0.9, 1.4]), aux((0, 0, 1), (0, 0, 1))).to_vector()
    assert poisson_bracket(X[0], P[0], z) == pytest.approx(1.005, abs=1e-15)


def test_aux_coordinate_commutes_with_positions():
    X, _ = represent_functions(NCCouplings(0.4, 0.7))
    z = ExtendedPoint.random(1, np.random.default_rng(5)).to_vector()
    for i in range(3):
        for j in range(3):
            assert poisson_bracket(PhaseFunction.variable(a_index(1, i)), X[j], z) == 0.0


def test_symbolic_bracket_agrees_with_pointwise():
    c = NCCouplings(0.3, 0.6)
    X, P = represent_functions(c)
    rng = np.random.default_rng(2)
    for _ in range(10):
        z = ExtendedPoint.random(1, rng).to_vector()
        for f in X:
            for g in P:
                assert bracket_function(f, g, 1)(z) == pytest.approx(poisson_bracket(f, g, z), abs=1e-14)


def test_phase_function_arithmetic():
    x = PhaseFunction.variable(0)
    y = PhaseFunction.variable(1)
    f = 3 * x * x * y - y + 2.5
    z = np.array([2.0, -1.0])
    assert f(z) == pytest.approx(3 * 4 * -1 + 1 + 2.5)
    np.testing.assert_allclose(f.gradient(z), [6 * 2 * -1, 3 * 4 - 1])
    assert f.diff(0).diff(0)(z) == pytest.approx(6 * -1)
    assert (f - f)(z) == 0.0


@given(st.integers(0, 2**32 - 1), coupling, coupling)
@settings(max_examples=30, deadline=None)
def test_gradient_matches_finite_differences(seed, ct, ce):
    rng = np.random.default_rng(seed)
    X, P = represent_functions(NCCouplings(ct, ce))
    z = ExtendedPoint.random(1, rng).to_vector()
    f = X[0] * P[1] + P[2] * P[2] - X[1]
    exact = f.gradient(z)
    numeric = finite_difference_gradient(f, z)
    scale = max(1.0, np.max(np.abs(exact)))
    assert np.max(np.abs(exact - numeric)) <= 1e-6 * scale


# -- verification report ---------------------------------------------------

@pytest.mark.parametrize("ct,ce", [(0.0, 0.0), (0.1, 0.2), (1.0, 1.0), (0.0, 1.0), (1.0, 0.1)])
def test_single_particle_algebra_holds(ct, ce):
    report = verify_single_particle_algebra(NCCouplings(ct, ce), samples=100, tol=1e-12, seed=11)
    assert report.passed, "\n".join(report.lines())
    for row in report.relations:
        assert row.max_residual <= 1e-12


def test_commutative_limit_has_zero_residuals():
    report = verify_single_particle_algebra(NCCouplings(0.0, 0.0), samples=20)
    assert all(row.max_residual == 0.0 for row in report.relations)


def test_report_is_seed_deterministic():
    c = NCCouplings(0.1, 0.2)
    a = verify_single_particle_algebra(c, samples=30, seed=42).lines()
    b = verify_single_particle_algebra(c, samples=30, seed=42).lines()
    assert a == b


def test_report_rejects_bad_arguments():
    with pytest.raises(ValidationError):
        verify_single_particle_algebra(NCCouplings(0.1, 0.1), samples=0)
