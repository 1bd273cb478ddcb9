import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy.integrate import solve_ivp

from conftest import canonical_j, fit_order, random_hamiltonian
from splitlq.errors import InputError
from splitlq.magnus import LinearFlowProblem, cf4_step, integrate
from splitlq.matfun import expm


def _constant_problem(M):
    return LinearFlowProblem(matrix=lambda t: M, dim=M.shape[0])


def test_cf4_exact_for_constant_matrix():
    rng = np.random.default_rng(31)
    M = rng.standard_normal((3, 3))
    y0 = rng.standard_normal(3)
    y1 = cf4_step(_constant_problem(M), 0.0, 0.4, y0)
    assert np.max(np.abs(y1 - expm(0.4 * M) @ y0)) < 1e-13


def test_cf4_scalar_linear_in_time_is_simpson_exact():
    # m(t) = t: the exponent reduces to Simpson's rule, exact here,
    # so the step equals exp(integral of m) = exp((t1^2 - t0^2)/2).
    prob = LinearFlowProblem(matrix=lambda t: np.array([[t]]), dim=1)
    y1 = cf4_step(prob, 0.0, 1.0, np.array([1.0]))
    assert y1[0] == pytest.approx(np.exp(0.5), rel=1e-14)


def test_cf4_fourth_order_on_noncommuting_problem():
    A0 = np.array([[0.0, 1.0], [-1.0, 0.0]])
    A1 = np.array([[0.5, 0.2], [0.0, -0.5]])
    matrix = lambda t: A0 + np.cos(t) * A1
    prob = LinearFlowProblem(matrix=matrix, dim=2)
    y0 = np.array([1.0, 0.3])
    sol = solve_ivp(lambda t, y: matrix(t) @ y, [0.0, 2.0], y0,
                    rtol=1e-13, atol=1e-15)
    ref = sol.y[:, -1]
    steps_list = [8, 16, 32, 64]
    errs = [np.max(np.abs(integrate(prob, 0.0, 2.0, k, y0) - ref))
            for k in steps_list]
    order = fit_order([2.0 / k for k in steps_list], errs)
    assert order == pytest.approx(4.0, abs=0.2)


def test_integrate_single_step_equals_cf4():
    rng = np.random.default_rng(32)
    M = rng.standard_normal((2, 2))
    prob = _constant_problem(M)
    y0 = rng.standard_normal(2)
    assert_allclose(integrate(prob, 0.0, 0.3, 1, y0),
                    cf4_step(prob, 0.0, 0.3, y0), atol=0.0)


def test_integrate_error_shrinks_sixteenfold():
    matrix = lambda t: np.array([[2.0 + np.tanh(5.0 * (t - 0.5)), -0.2],
                                 [0.1, -1.0 - 0.3 * t]])
    prob = LinearFlowProblem(matrix=matrix, dim=2)
    y0 = np.array([1.0, -1.0])
    ref = integrate(prob, 0.0, 1.0, 2048, y0)
    e1 = np.max(np.abs(integrate(prob, 0.0, 1.0, 16, y0) - ref))
    e2 = np.max(np.abs(integrate(prob, 0.0, 1.0, 32, y0) - ref))
    assert e1 / e2 == pytest.approx(16.0, rel=0.25)


def test_forward_backward_round_trip():
    matrix = lambda t: np.array([[np.sin(t), 1.0], [-1.0, np.cos(t)]])
    prob = LinearFlowProblem(matrix=matrix, dim=2)
    y0 = np.array([0.7, -0.2])
    y1 = integrate(prob, 0.0, 1.0, 64, y0)
    back = integrate(prob, 1.0, 0.0, 64, y1)
    assert np.max(np.abs(back - y0)) < 1e-10


def test_cf4_step_symplectic_for_hamiltonian_flow():
    rng = np.random.default_rng(33)
    J = canonical_j(2)
    H0 = random_hamiltonian(rng, 2)
    H1 = random_hamiltonian(rng, 2)
    prob = LinearFlowProblem(matrix=lambda t: H0 + np.sin(t) * H1, dim=4)
    Phi = cf4_step(prob, 0.0, 0.3, np.eye(4))
    assert np.max(np.abs(Phi.T @ J @ Phi - J)) < 1e-10


def test_cf4_rejects_zero_step_and_bad_counts():
    prob = _constant_problem(np.eye(2))
    with pytest.raises(InputError):
        cf4_step(prob, 0.0, 0.0, np.ones(2))
    with pytest.raises(InputError):
        integrate(prob, 0.0, 1.0, 0, np.ones(2))
