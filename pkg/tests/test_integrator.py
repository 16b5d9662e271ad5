import numpy as np
import pytest
from scipy.integrate import solve_ivp

from ncps_dyn.errors import NumericalError, SingularityError, StepSizeUnderflow, ValidationError
from ncps_dyn.integrator import dopri5


def test_exponential_decay():
    t = np.linspace(0, 5, 11)
    Y, stats = dopri5(lambda t, y: -0.7 * y, [2.0], t, rel_tol=1e-12, abs_tol=1e-14)
    np.testing.assert_allclose(Y[:, 0], 2.0 * np.exp(-0.7 * t), rtol=1e-11)
    assert stats.steps > 0 and stats.evaluations >= 6 * stats.steps


def test_lands_exactly_on_output_times():
    # y' = 1 integrates exactly, so any landing error would show up directly
    t = np.array([0.0, 0.1, 0.3, 1.7, 2.0])
    Y, _ = dopri5(lambda t, y: np.ones(1), [0.0], t)
    np.testing.assert_allclose(Y[:, 0], t, rtol=0, atol=1e-15)


def test_non_autonomous_polynomial_is_exact():
    # fifth-order method integrates t^4 without truncation error
    t = np.linspace(0, 2, 5)
    Y, _ = dopri5(lambda t, y: np.array([t ** 4]), [0.0], t)
    np.testing.assert_allclose(Y[:, 0], t ** 5 / 5, rtol=1e-13, atol=1e-15)


def test_matches_reference_solver_on_van_der_pol():
    def f(t, y):
        return np.array([y[1], 2.0 * (1 - y[0] ** 2) * y[1] - y[0]])

    t = np.linspace(0, 10, 41)
    Y, _ = dopri5(f, [2.0, 0.0], t, rel_tol=1e-11, abs_tol=1e-13)
    ref = solve_ivp(f, (0, 10), [2.0, 0.0], method="DOP853", t_eval=t, rtol=1e-13, atol=1e-15)
    np.testing.assert_allclose(Y, ref.y.T, atol=1e-8)


def test_tolerance_controls_error():
    f = lambda t, y: np.array([y[1], -y[0]])
    t = np.array([0.0, 20.0])
    errors = []
    for tol in (1e-6, 1e-9, 1e-12):
        Y, _ = dopri5(f, [1.0, 0.0], t, rel_tol=tol, abs_tol=tol)
        errors.append(abs(Y[-1, 0] - np.cos(20.0)))
    assert errors[0] > errors[1] > errors[2]
    assert errors[2] < 1e-9


def test_zero_rhs_keeps_state():
    y0 = np.array([1.5, -2.0, 0.25])
    Y, _ = dopri5(lambda t, y: np.zeros(3), y0, np.linspace(0, 100, 7))
    assert np.all(Y == y0)


def test_deterministic():
    f = lambda t, y: np.array([y[1], -np.sin(y[0])])
    t = np.linspace(0, 30, 61)
    a, _ = dopri5(f, [1.0, 0.0], t)
    b, _ = dopri5(f, [1.0, 0.0], t)
    assert np.array_equal(a, b)


def test_blow_up_raises_underflow_with_last_state():
    # y' = y^2 from y(0) = 1 blows up at t = 1
    with pytest.raises(StepSizeUnderflow) as info:
        dopri5(lambda t, y: y ** 2, [1.0], [0.0, 2.0])
    assert info.value.t == pytest.approx(1.0, abs=1e-3)
    assert np.all(np.isfinite(info.value.state))


def test_singularity_is_reported_with_time():
    def f(t, y):
        if y[0] < 0.5:
            raise SingularityError("too close")
        return np.array([-1.0])

    with pytest.raises(SingularityError) as info:
        dopri5(f, [1.0], [0.0, 1.0])
    assert info.value.t is not None and info.value.t <= 0.5 + 1e-12
    assert info.value.state[0] >= 0.5


def test_step_budget():
    with pytest.raises(NumericalError):
        dopri5(lambda t, y: np.array([y[1], -1e6 * y[0]]), [1.0, 0.0], [0.0, 100.0], max_steps=50)


@pytest.mark.parametrize("t_out", [[0.0], [0.0, 1.0, 1.0], [1.0, 0.0], [0.0, np.inf]])
def test_invalid_output_grid(t_out):
    with pytest.raises(ValidationError):
        dopri5(lambda t, y: y, [1.0], t_out)


def test_invalid_tolerance():
    with pytest.raises(ValidationError):
        dopri5(lambda t, y: y, [1.0], [0.0, 1.0], rel_tol=0.0)
