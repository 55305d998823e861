"""Rigid-body layer: inertia handling, dynamics, transformed matrices."""
import numpy as np
import pytest

from attsync.attmath import kinematics_matrix, theta_from_inertia
from attsync.rigid_body import (
    InertiaParams,
    SpacecraftState,
    angular_acceleration,
    c_star,
    h_star,
    mrp_acceleration,
    mrp_rate,
    regression,
)

RNG = np.random.default_rng(7)


def random_spd(rng, scale=1.0):
    a = rng.normal(size=(3, 3))
    return scale * (a @ a.T + 3 * np.eye(3))


def test_inertia_params_round_trip():
    j = random_spd(RNG)
    p = InertiaParams.from_matrix(j)
    assert np.allclose(p.matrix, j, atol=1e-14)
    assert np.allclose(p.theta, theta_from_inertia(j), atol=1e-14)


def test_inertia_params_rejects_bad_matrices():
    with pytest.raises(ValueError):
        InertiaParams.from_matrix(np.array([[1.0, 0.5, 0.0],
                                            [0.4, 1.0, 0.0],
                                            [0.0, 0.0, 1.0]]))
    with pytest.raises(ValueError):
        InertiaParams.from_matrix(-np.eye(3))


def test_spacecraft_state_shapes():
    st = SpacecraftState(np.zeros(3), np.zeros(3))
    assert st.sigma.shape == (3,) and st.omega.shape == (3,)
    with pytest.raises(ValueError):
        SpacecraftState(np.zeros(4), np.zeros(3))


def test_angular_acceleration_example():
    inertia = InertiaParams.from_matrix(np.diag([1.0, 2.0, 3.0]))
    got = angular_acceleration(inertia, np.array([1.0, 1.0, 1.0]), np.zeros(3))
    assert np.allclose(got, [-1.0, 1.0, -1.0 / 3.0], atol=1e-12)


def test_angular_acceleration_momentum_conservation():
    # torque-free: d/dt (J w) = -w x (J w), so |J w| is constant
    inertia = InertiaParams.from_matrix(random_spd(RNG))
    j = inertia.matrix
    w = RNG.normal(size=3)
    wdot = angular_acceleration(inertia, w, np.zeros(3))
    dh = j @ wdot + np.cross(w, j @ w)
    assert np.allclose(dh, 0.0, atol=1e-12)


def test_mrp_rate_is_kinematics_column():
    got = mrp_rate(np.array([0.1, 0.3, 0.5]), np.array([1.0, 0.0, 0.0]))
    assert np.allclose(got, [0.1675, -0.235, 0.175], atol=1e-12)
    sigma = RNG.uniform(-1, 1, 3)
    omega = RNG.normal(size=3)
    assert np.allclose(mrp_rate(sigma, omega),
                       kinematics_matrix(sigma) @ omega, atol=1e-14)


def test_h_star_identity_inertia_at_origin():
    inertia = InertiaParams.from_matrix(np.eye(3))
    assert np.allclose(h_star(inertia, np.zeros(3)), 16.0 * np.eye(3),
                       atol=1e-12)


def test_h_star_symmetric_positive_definite():
    for _ in range(100):
        inertia = InertiaParams.from_matrix(random_spd(RNG))
        sigma = RNG.uniform(-1.2, 1.2, 3)
        h = h_star(inertia, sigma)
        assert np.allclose(h, h.T, atol=1e-10)
        np.linalg.cholesky(h)  # raises if not positive definite


def test_c_star_skew_property():
    # x^T (dH*/dt - 2 C*) x = 0 along any trajectory direction
    for _ in range(100):
        inertia = InertiaParams.from_matrix(random_spd(RNG))
        sigma = RNG.uniform(-1.0, 1.0, 3)
        sigma_dot = RNG.normal(size=3)
        x = RNG.normal(size=3)
        eps = 1e-6
        hdot = (h_star(inertia, sigma + eps * sigma_dot)
                - h_star(inertia, sigma - eps * sigma_dot)) / (2 * eps)
        c = c_star(inertia, sigma, sigma_dot)
        val = x @ (hdot - 2.0 * c) @ x
        assert abs(val) <= 1e-6 * (1.0 + x @ x)


def test_regression_matches_matrix_form():
    for _ in range(100):
        inertia = InertiaParams.from_matrix(random_spd(RNG))
        sigma = RNG.uniform(-1.0, 1.0, 3)
        sigma_dot, v_r, a_r = RNG.normal(size=(3, 3))
        y = regression(sigma, sigma_dot, v_r, a_r)
        want = (h_star(inertia, sigma) @ a_r
                + c_star(inertia, sigma, sigma_dot) @ v_r)
        got = y @ inertia.theta
        scale = max(1.0, np.linalg.norm(want))
        assert np.linalg.norm(got - want) <= 1e-10 * scale


def test_mrp_acceleration_consistent_with_rate():
    inertia = InertiaParams.from_matrix(random_spd(RNG))
    sigma = RNG.uniform(-0.8, 0.8, 3)
    omega = RNG.normal(size=3)
    torque = RNG.normal(size=3)
    got = mrp_acceleration(inertia, sigma, omega, torque)
    h = 1e-7
    # advance sigma and omega with their own derivatives and difference
    sdot = mrp_rate(sigma, omega)
    wdot = angular_acceleration(inertia, omega, torque)
    fd = (mrp_rate(sigma + h * sdot, omega + h * wdot)
          - mrp_rate(sigma - h * sdot, omega - h * wdot)) / (2 * h)
    assert np.allclose(got, fd, atol=1e-6)
