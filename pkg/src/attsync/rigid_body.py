"""Single rigid-body dynamics in MRP coordinates.

Two equivalent views of the same plant:

* body frame: J omega_dot = -S(omega) J omega + u
* MRP coordinates: H*(sigma) sigma_ddot + C*(sigma, sigma_dot) sigma_dot
  = G^{-T} u, an Euler-Lagrange form obtained by substituting
  omega = G^{-1} sigma_dot.

H* is symmetric positive definite, d(H*)/dt - 2 C* is skew-symmetric, and
H* a + C* v is linear in the packed inertia vector theta, which is what the
adaptive controller exploits through `regression`.

Functions accept either an `InertiaParams` or a raw (..., 3, 3) inertia
stack, so the fleet simulator can evaluate every spacecraft in one call.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .attmath import (
    inertia_from_theta,
    kinematics_matrix,
    kinematics_matrix_dot,
    kinematics_matrix_inverse,
    f_operator,
    l_operator,
    mat_vec,
    skew,
    theta_from_inertia,
)


@dataclass(frozen=True)
class InertiaParams:
    """Inertia matrix of one spacecraft plus its packed 6-vector.

    The matrix must be symmetric (to 1e-12) and positive definite; both are
    checked at construction, positive definiteness through the three leading
    principal minors.
    """

    matrix: np.ndarray
    theta: np.ndarray = field(init=False)

    def __post_init__(self):
        j = np.array(self.matrix, dtype=float)
        if j.shape != (3, 3):
            raise ValueError("inertia matrix must be 3x3")
        if not np.all(np.isfinite(j)):
            raise ValueError("inertia matrix must be finite")
        minors = (
            j[0, 0],
            j[0, 0] * j[1, 1] - j[0, 1] * j[1, 0],
            np.linalg.det(j),
        )
        if min(minors) <= 0.0:
            raise ValueError(
                "inertia matrix is not positive definite "
                "(leading principal minors %r)" % (tuple(float(m) for m in minors),)
            )
        theta = theta_from_inertia(j)  # also enforces symmetry
        j.flags.writeable = False
        theta.flags.writeable = False
        object.__setattr__(self, "matrix", j)
        object.__setattr__(self, "theta", theta)

    @classmethod
    def from_matrix(cls, matrix) -> "InertiaParams":
        return cls(np.asarray(matrix, dtype=float))

    @classmethod
    def from_theta(cls, theta) -> "InertiaParams":
        theta = np.asarray(theta, dtype=float)
        if theta.shape != (6,):
            raise ValueError("theta must be a 6-vector")
        return cls(inertia_from_theta(theta))


@dataclass(frozen=True)
class SpacecraftState:
    """Attitude sigma (MRP) and body angular velocity omega of one craft."""

    sigma: np.ndarray
    omega: np.ndarray

    def __post_init__(self):
        sigma = np.array(self.sigma, dtype=float)
        omega = np.array(self.omega, dtype=float)
        if sigma.shape != (3,) or omega.shape != (3,):
            raise ValueError("sigma and omega must be 3-vectors")
        if not (np.all(np.isfinite(sigma)) and np.all(np.isfinite(omega))):
            raise ValueError("state components must be finite")
        sigma.flags.writeable = False
        omega.flags.writeable = False
        object.__setattr__(self, "sigma", sigma)
        object.__setattr__(self, "omega", omega)


def _inertia_matrix(inertia):
    """Accept InertiaParams or a raw (..., 3, 3) array."""
    if isinstance(inertia, InertiaParams):
        return inertia.matrix
    return np.asarray(inertia, dtype=float)


def angular_acceleration(inertia, omega, torque):
    """Body-frame omega_dot = J^{-1} (-omega x (J omega) + u)."""
    j = _inertia_matrix(inertia)
    omega = np.asarray(omega, dtype=float)
    rhs = -np.cross(omega, mat_vec(j, omega)) + np.asarray(torque, dtype=float)
    return np.linalg.solve(j, rhs[..., None])[..., 0]


def mrp_rate(sigma, omega):
    """sigma_dot = G(sigma) @ omega."""
    return mat_vec(kinematics_matrix(sigma), omega)


def mrp_acceleration(inertia, sigma, omega, torque):
    """sigma_ddot along the true dynamics: dG/dt @ omega + G @ omega_dot."""
    sigma_dot = mrp_rate(sigma, omega)
    omega_dot = angular_acceleration(inertia, omega, torque)
    g_dot = kinematics_matrix_dot(sigma, sigma_dot)
    return mat_vec(g_dot, omega) + mat_vec(kinematics_matrix(sigma), omega_dot)


def h_star(inertia, sigma):
    """Transformed inertia H* = G^{-T} J G^{-1}, symmetric positive definite."""
    j = _inertia_matrix(inertia)
    g_inv = kinematics_matrix_inverse(sigma)
    return np.swapaxes(g_inv, -1, -2) @ j @ g_inv


def c_star(inertia, sigma, sigma_dot):
    """Coriolis-like matrix of the MRP-space Euler-Lagrange form.

    C* = -G^{-T} J G^{-1} (dG/dt) G^{-1} - G^{-T} S(J G^{-1} sigma_dot) G^{-1}.

    The sign of the first term is forced by d(H*)/dt - 2 C* being
    skew-symmetric and by consistency with the body-frame dynamics; both are
    pinned in tests.
    """
    j = _inertia_matrix(inertia)
    g_inv = kinematics_matrix_inverse(sigma)
    g_inv_t = np.swapaxes(g_inv, -1, -2)
    g_dot = kinematics_matrix_dot(sigma, np.asarray(sigma_dot, dtype=float))
    core = mat_vec(j, mat_vec(g_inv, sigma_dot))
    return -(g_inv_t @ j @ g_inv @ g_dot @ g_inv) - g_inv_t @ skew(core) @ g_inv


def regression(sigma, sigma_dot, v_r, a_r):
    """Regressor Y with Y @ theta == H* a_r + C* v_r for every inertia.

    Y = G^{-T} ( L(G^{-1} a_r) - L(G^{-1} (dG/dt) G^{-1} v_r)
                 - F(G^{-1} sigma_dot, G^{-1} v_r) ).

    Inertia-free by construction; the controller evaluates it from measured
    signals only.
    """
    sigma_dot = np.asarray(sigma_dot, dtype=float)
    g_inv = kinematics_matrix_inverse(sigma)
    g_inv_t = np.swapaxes(g_inv, -1, -2)
    g_dot = kinematics_matrix_dot(sigma, sigma_dot)
    gi_ar = mat_vec(g_inv, np.asarray(a_r, dtype=float))
    gi_vr = mat_vec(g_inv, np.asarray(v_r, dtype=float))
    gi_sd = mat_vec(g_inv, sigma_dot)
    mid = mat_vec(g_inv @ g_dot, gi_vr)
    return g_inv_t @ (l_operator(gi_ar) - l_operator(mid) - f_operator(gi_sd, gi_vr))
