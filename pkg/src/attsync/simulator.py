"""Fixed-step closed-loop simulation of a spacecraft fleet.

Integrates attitude, body rate, and the per-craft inertia estimates with
classical RK4.  Neighbor attitudes and rates are read exactly (they follow
from exchanged states); neighbor attitude accelerations are not directly
available, and how the desired acceleration is obtained is the one free
choice in the loop.  Two sources are implemented:

``smoothed`` (default)
    Each craft runs a critically damped second-order generator driven by
    the position and rate aggregates of its neighborhood.  The generator
    state (chi, chi_dot) and its computed chi_ddot replace the aggregate
    triple in the control law, so the desired acceleration is consistent
    with the desired rate by construction and no acceleration ever has to
    be exchanged.  With this source the fleet Lyapunov function decreases
    exactly (up to integration error) and the consensus / tracking fixed
    points are unchanged.  `smoothing_rate` sets the generator natural
    frequency; a positive `rate_leak` adds damping on the generator's own
    rate so a leaderless fleet parks at its consensus attitude instead of
    keeping whatever common spin the initial conditions left.

``held``
    Each craft's broadcast acceleration is held one step in a `LagBuffer`
    (zero-order hold, initialized to zero) and refreshed after each step
    from the torques just applied.  The hold closes a discrete feedback
    loop through the inertia-estimate feedforward whose per-step gain does
    not shrink with the step size; it can diverge while the estimates are
    swinging, which is why it is not the default.

The whole fleet is advanced as stacked (N, 3) / (N, 6) arrays through the
same public control-law functions used for a single craft; there is no
separate batched formula path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .attmath import kinematics_matrix, kinematics_matrix_dot, mat_vec
from .control import (
    GainSet,
    NeighborhoodSignals,
    ReferenceTrajectory,
    controller_outputs,
    filtered_error,
    sync_error,
)
from .errors import ConfigError, SimulationDiverged
from .rigid_body import (
    InertiaParams,
    SpacecraftState,
    angular_acceleration,
    h_star,
    inertia_from_theta,
    mrp_rate,
)
from .topology import (
    CommTopology,
    aggregate_weights,
    leader_rooted_valid,
    leaderless_valid,
)

MODES = ("leaderless", "tracking")
ACCEL_SOURCES = ("smoothed", "held")

# trajectories beyond this attitude norm are treated as diverged
DIVERGENCE_SIGMA_NORM = 1e3


@dataclass(frozen=True)
class Spacecraft:
    """Everything fixed about one craft: inertia, start state, gains, prior.

    theta_hat0 is the initial inertia estimate of the adaptive law; it
    defaults to zero (no prior knowledge).
    """

    inertia: InertiaParams
    initial_state: SpacecraftState
    gains: GainSet
    theta_hat0: np.ndarray = field(default_factory=lambda: np.zeros(6))

    def __post_init__(self):
        if self.gains.Lambda.shape != (3, 3):
            raise ValueError("per-spacecraft gains must be single 3x3/6x6 matrices")
        th = np.array(self.theta_hat0, dtype=float)
        if th.shape != (6,):
            raise ValueError("theta_hat0 must be a 6-vector")
        if not np.all(np.isfinite(th)):
            raise ValueError("theta_hat0 must be finite")
        th.flags.writeable = False
        object.__setattr__(self, "theta_hat0", th)


@dataclass(frozen=True)
class Scenario:
    """A complete, validated simulation setup.

    Construction checks that the topology matches the mode: leaderless runs
    need every craft to have an in-neighbor plus a directed spanning tree,
    tracking runs need a reference and a leader that reaches every craft.

    accel_source picks how the desired acceleration is obtained ("smoothed"
    or "held", see the module docstring); smoothing_rate is the generator
    natural frequency in rad/s (critical damping) and rate_leak is an extra
    damping on the generator's own rate (both only used by "smoothed").  A
    positive leak makes each reference bleed off its drift rate, so a
    leaderless fleet settles at its consensus attitude instead of spinning
    there forever on whatever common rate the initial conditions left.

    control_enabled / adaptation_enabled are plant-inspection hooks (open
    loop, frozen estimates); both default to on.
    """

    spacecraft: tuple
    topology: CommTopology
    mode: str
    reference: ReferenceTrajectory | None = None
    dt: float = 0.005
    duration: float = 40.0
    seed: int | None = None
    shadow_switch: bool = False
    control_enabled: bool = True
    adaptation_enabled: bool = True
    accel_source: str = "smoothed"
    smoothing_rate: float = 6.0
    rate_leak: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "spacecraft", tuple(self.spacecraft))
        if self.mode not in MODES:
            raise ConfigError("mode must be one of %r, got %r" % (MODES, self.mode))
        if self.accel_source not in ACCEL_SOURCES:
            raise ConfigError(
                "accel_source must be one of %r, got %r"
                % (ACCEL_SOURCES, self.accel_source))
        if not (math.isfinite(self.smoothing_rate) and self.smoothing_rate > 0.0):
            raise ConfigError("smoothing_rate must be positive and finite")
        if not (math.isfinite(self.rate_leak) and self.rate_leak >= 0.0):
            raise ConfigError("rate_leak must be nonnegative and finite")
        n = len(self.spacecraft)
        if n == 0:
            raise ConfigError("scenario needs at least one spacecraft")
        if self.topology.n != n:
            raise ConfigError(
                "topology is for %d spacecraft, scenario has %d" % (self.topology.n, n))
        if not (math.isfinite(self.dt) and self.dt > 0.0):
            raise ConfigError("dt must be positive and finite")
        if not (math.isfinite(self.duration) and self.duration >= self.dt):
            raise ConfigError("duration must be at least one step")
        if self.mode == "leaderless":
            if self.reference is not None:
                raise ConfigError("leaderless mode takes no reference trajectory")
            if not leaderless_valid(self.topology):
                raise ConfigError(
                    "leaderless topology invalid: every spacecraft needs an "
                    "in-neighbor and the graph must contain a directed spanning tree")
        else:
            if self.reference is None:
                raise ConfigError("tracking mode requires a reference trajectory")
            if self.topology.leader_weights is None:
                raise ConfigError("tracking mode requires leader weights")
            if not leader_rooted_valid(self.topology):
                raise ConfigError(
                    "tracking topology invalid: the leader must reach every "
                    "spacecraft through directed edges")

    @property
    def n(self) -> int:
        return len(self.spacecraft)

    @property
    def n_steps(self) -> int:
        return int(math.floor(self.duration / self.dt + 1e-9))


@dataclass
class LagBuffer:
    """Per-craft desired-acceleration state carried between steps.

    sigma_ddot is the one-step hold of each craft's broadcast acceleration
    (the "held" source reads it; both sources refresh it after each step so
    it always holds the latest desired-acceleration values).  chi / chi_dot
    are the desired-trajectory generator states used by the "smoothed"
    source; they default to zero and are seated at the current aggregates
    by Simulation.initial_buffer.
    """

    sigma_ddot: np.ndarray
    chi: np.ndarray = None
    chi_dot: np.ndarray = None

    def __post_init__(self):
        arr = np.asarray(self.sigma_ddot, dtype=float)
        if arr.ndim != 2 or arr.shape[1] != 3:
            raise ValueError("sigma_ddot must have shape (n, 3)")
        self.sigma_ddot = arr
        for name in ("chi", "chi_dot"):
            val = getattr(self, name)
            val = np.zeros_like(arr) if val is None else np.asarray(val, dtype=float)
            if val.shape != arr.shape:
                raise ValueError("%s must have the same shape as sigma_ddot" % name)
            setattr(self, name, val)

    @classmethod
    def zeros(cls, n: int) -> "LagBuffer":
        return cls(np.zeros((n, 3)))


@dataclass(frozen=True)
class StepRecord:
    """Fleet snapshot after one step, controller signals included.

    Controller quantities (torque, errors, Lyapunov value) are evaluated at
    the stored state with the desired-acceleration state available at that
    instant.
    """

    t: float
    sigma: np.ndarray
    omega: np.ndarray
    torque: np.ndarray
    theta_hat: np.ndarray
    sync_error: np.ndarray
    filtered_error: np.ndarray
    lyapunov: float
    disagreement: float
    tracking_error: float | None = None


@dataclass
class TrajectoryLog:
    """Decimated time history of a run; arrays indexed (record, craft, axis)."""

    scenario: Scenario
    decimate: int
    times: np.ndarray
    sigma: np.ndarray
    omega: np.ndarray
    torque: np.ndarray
    theta_hat: np.ndarray
    sync_error: np.ndarray
    filtered_error: np.ndarray
    lyapunov: np.ndarray
    disagreement: np.ndarray
    tracking_error: np.ndarray | None = None

    @property
    def n_records(self) -> int:
        return self.times.shape[0]


def _max_pairwise(sigma):
    """Largest attitude distance between any two craft, max_ij |sigma_i - sigma_j|."""
    diff = sigma[:, None, :] - sigma[None, :, :]
    return float(np.sqrt(np.einsum("ijk,ijk->ij", diff, diff).max()))


def _lyapunov_core(j_stack, gamma_diag, theta_true, sigma, s, theta_hat):
    """V = 1/2 sum_i s_i^T H*_i s_i + 1/2 sum_i err_i^T Gamma_i^{-1} err_i."""
    h = h_star(j_stack, sigma)
    v_s = 0.5 * float(np.einsum("ni,nij,nj->", s, h, s))
    err = theta_true - theta_hat
    v_t = 0.5 * float(np.sum(err * err / gamma_diag))
    return v_s + v_t


class Simulation:
    """Stepper bound to one scenario, with per-fleet arrays precomputed."""

    def __init__(self, scenario: Scenario):
        self.scenario = scenario
        craft = scenario.spacecraft
        self.n = len(craft)
        self.dt = scenario.dt
        self.j_stack = np.stack([c.inertia.matrix for c in craft])
        self.theta_true = np.stack([c.inertia.theta for c in craft])
        self.gains = GainSet(
            np.stack([c.gains.Lambda for c in craft]),
            np.stack([c.gains.K for c in craft]),
            np.stack([c.gains.Gamma for c in craft]),
        )
        self.tracking = scenario.mode == "tracking"
        self.weights, self.leader_coeff = aggregate_weights(
            scenario.topology, with_leader=self.tracking)
        self.ref = scenario.reference
        self.smoothed = scenario.accel_source == "smoothed"
        # when coordinates may flip representation, aggregate over each
        # neighbor's image in the receiving craft's own chart
        self.aligned = self.smoothed and scenario.shadow_switch
        # critically damped second-order generator coefficients
        wn = scenario.smoothing_rate
        self._gen_kp = wn * wn
        self._gen_kd = 2.0 * wn
        self._gen_leak = scenario.rate_leak

    # -- core evaluations ------------------------------------------------

    def _neighbor_sums(self, sigma, sigma_dot):
        """Weighted neighbor position/rate sums, chart-aligned if enabled.

        Alignment maps each neighbor's attitude to whichever of its two
        equivalent representations (sigma or -sigma/|sigma|^2) lies closer
        to the receiving craft, so a neighbor's representation flip never
        jumps the aggregate.
        """
        if not self.aligned:
            return self.weights @ sigma, self.weights @ sigma_dot
        norm2 = np.einsum("ni,ni->n", sigma, sigma)
        with np.errstate(divide="ignore", invalid="ignore"):
            shadow = -sigma / norm2[:, None]
            radial = np.einsum("ni,ni->n", sigma, sigma_dot)
            shadow_dot = (-sigma_dot * norm2[:, None]
                          + 2.0 * sigma * radial[:, None]) / np.square(norm2)[:, None]
        d_raw = np.einsum("ijk,ijk->ij",
                          sigma[:, None, :] - sigma[None, :, :],
                          sigma[:, None, :] - sigma[None, :, :])
        diff_sh = sigma[:, None, :] - shadow[None, :, :]
        with np.errstate(invalid="ignore"):
            d_sh = np.einsum("ijk,ijk->ij", diff_sh, diff_sh)
        d_sh = np.where(np.isfinite(d_sh), d_sh, np.inf)
        use_shadow = (d_sh < d_raw) & (self.weights > 0.0)
        img = np.where(use_shadow[:, :, None], shadow[None, :, :],
                       sigma[None, :, :])
        img_dot = np.where(use_shadow[:, :, None], shadow_dot[None, :, :],
                           sigma_dot[None, :, :])
        return (np.einsum("ij,ijk->ik", self.weights, img),
                np.einsum("ij,ijk->ik", self.weights, img_dot))

    def _aggregates(self, t, sigma, sigma_dot):
        """Neighborhood position/rate aggregates (leader folded in)."""
        sigma_d, sigma_d_dot = self._neighbor_sums(sigma, sigma_dot)
        srdd = None
        if self.tracking:
            sr, srd, srdd = self.ref.at(t)
            if self.aligned:
                sr_n2 = float(sr @ sr)
                if sr_n2 > 0.0:
                    sh = -sr / sr_n2
                    sh_dot = (-srd * sr_n2 + 2.0 * sr * float(sr @ srd)) / sr_n2 ** 2
                    closer = (np.einsum("ni,ni->n", sigma - sh, sigma - sh)
                              < np.einsum("ni,ni->n", sigma - sr, sigma - sr))
                    pick = closer & (self.leader_coeff > 0.0)
                    sr = np.where(pick[:, None], sh, sr)
                    srd = np.where(pick[:, None], sh_dot, srd)
            lc = self.leader_coeff[:, None]
            sigma_d = sigma_d + lc * sr
            sigma_d_dot = sigma_d_dot + lc * srd
        return sigma_d, sigma_d_dot, srdd

    def _eval(self, t, sigma, omega, theta_hat, chi, chi_dot, held_sdd):
        """Closed-loop derivatives and controller signals at one instant.

        Returns (sigma_dot, omega_dot, theta_dot, chi_dot, chi_ddot, u, e, s);
        the chi derivatives are zero under the "held" source.
        """
        sigma_dot = mrp_rate(sigma, omega)
        sigma_d, sigma_d_dot, srdd = self._aggregates(t, sigma, sigma_dot)
        if self.smoothed:
            chi_ddot = (self._gen_kd * (sigma_d_dot - chi_dot)
                        + self._gen_kp * (sigma_d - chi)
                        - self._gen_leak * chi_dot)
            signals = NeighborhoodSignals(chi, chi_dot, chi_ddot)
            d_chi, d_chi_dot = chi_dot, chi_ddot
        else:
            sigma_d_ddot = self.weights @ held_sdd
            if self.tracking:
                sigma_d_ddot = sigma_d_ddot + self.leader_coeff[:, None] * srdd
            signals = NeighborhoodSignals(sigma_d, sigma_d_dot, sigma_d_ddot)
            d_chi = d_chi_dot = np.zeros_like(sigma)
        e, e_dot = sync_error(sigma, sigma_dot, signals)
        if self.scenario.control_enabled:
            u, s, theta_dot = controller_outputs(
                sigma, sigma_dot, signals, e, e_dot, theta_hat, self.gains)
            if not self.scenario.adaptation_enabled:
                theta_dot = np.zeros_like(theta_hat)
        else:
            u = np.zeros_like(sigma)
            s = filtered_error(e, e_dot, self.gains.Lambda)
            theta_dot = np.zeros_like(theta_hat)
        omega_dot = angular_acceleration(self.j_stack, omega, u)
        return sigma_dot, omega_dot, theta_dot, d_chi, d_chi_dot, u, e, s

    def _rk4(self, t, sigma, omega, theta_hat, chi, chi_dot, held_sdd):
        dt = self.dt
        h = dt / 2.0
        k1 = self._eval(t, sigma, omega, theta_hat, chi, chi_dot, held_sdd)
        k2 = self._eval(t + h, sigma + h * k1[0], omega + h * k1[1],
                        theta_hat + h * k1[2], chi + h * k1[3],
                        chi_dot + h * k1[4], held_sdd)
        k3 = self._eval(t + h, sigma + h * k2[0], omega + h * k2[1],
                        theta_hat + h * k2[2], chi + h * k2[3],
                        chi_dot + h * k2[4], held_sdd)
        k4 = self._eval(t + dt, sigma + dt * k3[0], omega + dt * k3[1],
                        theta_hat + dt * k3[2], chi + dt * k3[3],
                        chi_dot + dt * k3[4], held_sdd)
        w = dt / 6.0
        out = []
        for j, y in enumerate((sigma, omega, theta_hat, chi, chi_dot)):
            out.append(y + w * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]))
        return out

    def _apply_shadow(self, sigma, chi, chi_dot):
        """Flip craft beyond the unit ball to the equivalent representation.

        The desired-trajectory generator state is mapped through the same
        transform so the craft's errors stay continuous across its flip.
        """
        norm2 = np.einsum("ni,ni->n", sigma, sigma)
        mask = norm2 > 1.0
        if mask.any():
            sigma = sigma.copy()
            sigma[mask] = -sigma[mask] / norm2[mask, None]
            if self.smoothed:
                chi = chi.copy()
                chi_dot = chi_dot.copy()
                c_norm2 = np.einsum("ni,ni->n", chi[mask], chi[mask])
                ok = c_norm2 > 0.0
                rows = np.nonzero(mask)[0][ok]
                c_norm2 = c_norm2[ok][:, None]
                radial = np.einsum("ni,ni->n", chi[rows], chi_dot[rows])[:, None]
                chi_dot[rows] = (-chi_dot[rows] * c_norm2
                                 + 2.0 * chi[rows] * radial) / np.square(c_norm2)
                chi[rows] = -chi[rows] / c_norm2
        return sigma, chi, chi_dot

    def _check_state(self, t, sigma, omega, theta_hat):
        finite = (np.isfinite(sigma).all(axis=1)
                  & np.isfinite(omega).all(axis=1)
                  & np.isfinite(theta_hat).all(axis=1))
        with np.errstate(invalid="ignore"):
            norms = np.sqrt(np.einsum("ni,ni->n", sigma, sigma))
        bad = ~finite | (norms > DIVERGENCE_SIGMA_NORM)
        if bad.any():
            i = int(np.nonzero(bad)[0][0])
            raise SimulationDiverged(
                "spacecraft %d diverged at t = %.6g s (|sigma| = %.3g)"
                % (i + 1, t, norms[i]),
                craft_index=i, time=t)

    def _advance(self, t, t_next, sigma, omega, theta_hat, lag: LagBuffer):
        """One RK4 step plus the end-of-step evaluation that refreshes the lag."""
        sigma_n, omega_n, theta_n, chi_n, chi_dot_n = self._rk4(
            t, sigma, omega, theta_hat, lag.chi, lag.chi_dot, lag.sigma_ddot)
        if self.scenario.shadow_switch:
            sigma_n, chi_n, chi_dot_n = self._apply_shadow(sigma_n, chi_n, chi_dot_n)
        self._check_state(t_next, sigma_n, omega_n, theta_n)
        extras = self._eval(t_next, sigma_n, omega_n, theta_n, chi_n, chi_dot_n,
                            lag.sigma_ddot)
        if self.smoothed:
            # hold the generator's own acceleration output
            sdd = extras[4]
        else:
            sigma_dot, omega_dot = extras[0], extras[1]
            sdd = (mat_vec(kinematics_matrix_dot(sigma_n, sigma_dot), omega_n)
                   + mat_vec(kinematics_matrix(sigma_n), omega_dot))
        new_lag = LagBuffer(sdd, chi_n, chi_dot_n)
        return sigma_n, omega_n, theta_n, new_lag, extras

    def _make_record(self, t, sigma, omega, theta_hat, extras):
        u, e, s = extras[5], extras[6], extras[7]
        v = _lyapunov_core(self.j_stack, self.gains.gamma_diag, self.theta_true,
                           sigma, s, theta_hat)
        tracking_error = None
        if self.tracking:
            sr = self.ref.at(t)[0]
            tracking_error = float(np.linalg.norm(sigma - sr, axis=1).max())
        return StepRecord(
            t=t, sigma=sigma, omega=omega, torque=u, theta_hat=theta_hat,
            sync_error=e, filtered_error=s, lyapunov=v,
            disagreement=_max_pairwise(sigma), tracking_error=tracking_error)

    # -- public stepping -------------------------------------------------

    def initial_arrays(self):
        craft = self.scenario.spacecraft
        sigma = np.stack([c.initial_state.sigma for c in craft])
        omega = np.stack([c.initial_state.omega for c in craft])
        theta = np.stack([c.theta_hat0 for c in craft])
        return sigma, omega, theta

    def initial_buffer(self, sigma, omega, t: float = 0.0) -> LagBuffer:
        """Desired-state generator seated on each craft's own state.

        chi(0) = sigma(0) and chi_dot(0) = sigma_dot(0), so the initial
        reference error is exactly zero and the reference slides toward the
        neighborhood aggregate at the generator bandwidth instead of
        demanding an instantaneous jump.  Commanded rates then stay at the
        generator's own scale, which keeps the early torque transient tame.
        The acceleration hold (used by the held source) starts at zero.
        """
        sigma = np.asarray(sigma, dtype=float)
        omega = np.asarray(omega, dtype=float)
        return LagBuffer(np.zeros_like(sigma), sigma.copy(),
                         mrp_rate(sigma, omega))

    def step(self, states, adaptive_states, lag: LagBuffer, t: float):
        """Advance the fleet one step from time t.

        states : sequence of SpacecraftState, one per craft.
        adaptive_states : (n, 6) current inertia estimates.
        Returns (new_states, new_adaptive_states, new_lag, record).

        Build the first `lag` with initial_buffer to seat the generator on
        the craft's own state; LagBuffer.zeros starts it from rest at the
        origin instead.
        """
        sigma = np.stack([s.sigma for s in states])
        omega = np.stack([s.omega for s in states])
        theta = np.asarray(adaptive_states, dtype=float)
        if sigma.shape[0] != self.n or theta.shape != (self.n, 6):
            raise ValueError("state arrays do not match the scenario size")
        sigma_n, omega_n, theta_n, new_lag, extras = self._advance(
            t, t + self.dt, sigma, omega, theta, lag)
        record = self._make_record(t + self.dt, sigma_n, omega_n, theta_n, extras)
        new_states = [SpacecraftState(sigma_n[i], omega_n[i]) for i in range(self.n)]
        return new_states, theta_n, new_lag, record

    def run(self, decimate: int = 10) -> TrajectoryLog:
        """Integrate the full horizon and return the decimated history.

        Records are kept every `decimate` steps, always including the
        initial and final states.
        """
        if decimate < 1:
            raise ValueError("decimate must be a positive integer")
        sigma, omega, theta = self.initial_arrays()
        self._check_state(0.0, sigma, omega, theta)
        lag = self.initial_buffer(sigma, omega, 0.0)
        n_steps = self.scenario.n_steps
        records = [self._make_record(
            0.0, sigma, omega, theta,
            self._eval(0.0, sigma, omega, theta, lag.chi, lag.chi_dot,
                       lag.sigma_ddot))]
        for k in range(n_steps):
            t = k * self.dt
            t_next = (k + 1) * self.dt
            sigma, omega, theta, lag, extras = self._advance(
                t, t_next, sigma, omega, theta, lag)
            if (k + 1) % decimate == 0 or k == n_steps - 1:
                records.append(self._make_record(t_next, sigma, omega, theta, extras))
        return self._collect(records, decimate)

    def _collect(self, records, decimate):
        tracking_error = None
        if self.tracking:
            tracking_error = np.array([r.tracking_error for r in records])
        return TrajectoryLog(
            scenario=self.scenario,
            decimate=decimate,
            times=np.array([r.t for r in records]),
            sigma=np.stack([r.sigma for r in records]),
            omega=np.stack([r.omega for r in records]),
            torque=np.stack([r.torque for r in records]),
            theta_hat=np.stack([r.theta_hat for r in records]),
            sync_error=np.stack([r.sync_error for r in records]),
            filtered_error=np.stack([r.filtered_error for r in records]),
            lyapunov=np.array([r.lyapunov for r in records]),
            disagreement=np.array([r.disagreement for r in records]),
            tracking_error=tracking_error,
        )


def step(scenario: Scenario, states, adaptive_states, lag: LagBuffer, t: float):
    """One fleet step; convenience wrapper over Simulation(scenario).step."""
    return Simulation(scenario).step(states, adaptive_states, lag, t)


def run(scenario: Scenario, decimate: int = 10) -> TrajectoryLog:
    """Simulate a scenario start to finish; see Simulation.run."""
    return Simulation(scenario).run(decimate=decimate)


def _draw_in_ball(rng, bound):
    # componentwise uniform, conditioned on the vector norm bound
    if bound == 0.0:
        return np.zeros(3)
    while True:
        v = rng.uniform(-bound, bound, 3)
        if v @ v <= bound * bound:
            return v


def random_initial_states(seed, n, sigma_bound=0.5, omega_bound=0.5):
    """Draw per-craft states uniformly with norm-bounded vectors.

    Components are uniform on [-bound, bound], rejection-sampled so that
    each attitude and rate vector also satisfies its norm bound.  Per
    craft, sigma is drawn first, then omega, so the sequence is stable for
    a given seed and count.  Bounds of zero give exactly zero states.
    """
    if n < 1:
        raise ValueError("need at least one spacecraft")
    if sigma_bound < 0.0 or omega_bound < 0.0:
        raise ValueError("bounds must be nonnegative")
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(n):
        sigma = _draw_in_ball(rng, sigma_bound)
        omega = _draw_in_ball(rng, omega_bound)
        out.append(SpacecraftState(sigma, omega))
    return out


def lyapunov_value(states, adaptive_states, true_thetas, mode, gains, topo,
                   ref=None, t=0.0):
    """Fleet Lyapunov function at one instant.

    V = 1/2 sum_i s_i^T H*_i s_i + 1/2 sum_i (theta_i - theta_hat_i)^T
    Gamma_i^{-1} (theta_i - theta_hat_i), with s_i built from the raw
    neighborhood aggregates (acceleration terms do not enter).  Matches a
    run's logged value under the "held" source, where the control law reads
    the raw aggregates directly; a "smoothed" run logs V built from its
    generator state instead (equal to this once the generator has settled
    on the aggregates).  `gains` may be a list of per-craft GainSet or one
    stacked set.
    """
    if mode not in MODES:
        raise ConfigError("mode must be one of %r" % (MODES,))
    sigma = np.stack([s.sigma for s in states])
    omega = np.stack([s.omega for s in states])
    theta_hat = np.asarray(adaptive_states, dtype=float)
    theta_true = np.asarray(true_thetas, dtype=float)
    if isinstance(gains, GainSet):
        lam, gamma_diag = gains.Lambda, gains.gamma_diag
    else:
        lam = np.stack([g.Lambda for g in gains])
        gamma_diag = np.stack([g.gamma_diag for g in gains])
    tracking = mode == "tracking"
    weights, leader_coeff = aggregate_weights(topo, with_leader=tracking)
    sigma_dot = mrp_rate(sigma, omega)
    sigma_d = weights @ sigma
    sigma_d_dot = weights @ sigma_dot
    if tracking:
        if ref is None:
            raise ConfigError("tracking mode requires a reference trajectory")
        sr, srd, _ = ref.at(t)
        sigma_d = sigma_d + leader_coeff[:, None] * sr
        sigma_d_dot = sigma_d_dot + leader_coeff[:, None] * srd
    e = sigma - sigma_d
    e_dot = sigma_dot - sigma_d_dot
    s = filtered_error(e, e_dot, lam)
    j_stack = inertia_from_theta(theta_true)
    return _lyapunov_core(j_stack, gamma_diag, theta_true, sigma, s, theta_hat)


def metrics(log: TrajectoryLog) -> dict:
    """Summary metrics of a run: disagreement, tracking error, bounds.

    Finals are scalars; full series come back under "series" as arrays.
    """
    sigma_dot = mrp_rate(log.sigma, log.omega)
    diff = sigma_dot[:, :, None, :] - sigma_dot[:, None, :, :]
    d_rate = np.sqrt(np.einsum("rijk,rijk->rij", diff, diff).max(axis=(1, 2)))
    torque_norm = np.linalg.norm(log.torque, axis=2)
    theta_norm = np.linalg.norm(log.theta_hat, axis=2)
    out = {
        "mode": log.scenario.mode,
        "records": int(log.n_records),
        "duration": float(log.times[-1]),
        "disagreement_final": float(log.disagreement[-1]),
        "disagreement_rate_final": float(d_rate[-1]),
        "lyapunov_initial": float(log.lyapunov[0]),
        "lyapunov_final": float(log.lyapunov[-1]),
        "torque_max": float(torque_norm.max()),
        "theta_hat_norm_max": float(theta_norm.max()),
        "series": {
            "t": log.times,
            "disagreement": log.disagreement,
            "disagreement_rate": d_rate,
            "lyapunov": log.lyapunov,
        },
    }
    if log.scenario.mode == "tracking":
        ref = log.scenario.reference
        ref_rate = np.stack([ref.at(t)[1] for t in log.times])
        t_rate = np.linalg.norm(sigma_dot - ref_rate[:, None, :], axis=2).max(axis=1)
        out["tracking_error_final"] = float(log.tracking_error[-1])
        out["tracking_rate_final"] = float(t_rate[-1])
        out["series"]["tracking_error"] = log.tracking_error
        out["series"]["tracking_rate"] = t_rate
    return out
