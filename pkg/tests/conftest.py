"""Shared fixtures: the six-craft fleet pieces and small scenario builders."""
import numpy as np
import pytest

from attsync.control import GainSet, ReferenceTrajectory
from attsync.rigid_body import InertiaParams, SpacecraftState
from attsync.simulator import Scenario, Spacecraft
from attsync.topology import CommTopology

# inertia set used by the built-in presets (kg m^2)
FLEET_J = [
    [[1.0, 0.1, 0.1], [0.1, 0.1, 0.1], [0.1, 0.1, 0.9]],
    [[1.5, 0.2, 0.3], [0.2, 0.9, 0.4], [0.3, 0.4, 2.0]],
    [[0.8, 0.1, 0.2], [0.1, 0.7, 0.3], [0.2, 0.3, 1.1]],
    [[1.2, 0.3, 0.7], [0.3, 0.9, 0.2], [0.7, 0.2, 1.4]],
    [[0.9, 0.15, 0.3], [0.15, 1.2, 0.4], [0.3, 0.4, 1.2]],
    [[1.1, 0.35, 0.45], [0.35, 1.0, 0.5], [0.45, 0.5, 1.3]],
]

# communication digraph of the presets: row i lists who craft i hears
FLEET_ADJ = np.array([
    [0, 0, 0, 1, 1, 1],
    [1, 0, 0, 0, 0, 0],
    [1, 1, 0, 0, 0, 0],
    [1, 0, 0, 0, 0, 0],
    [0, 0, 0, 1, 0, 0],
    [0, 0, 0, 0, 1, 0],
], dtype=float)

FLEET_LEADER_B = np.array([1.0, 0, 0, 0, 0, 0])


@pytest.fixture
def fleet_inertias():
    return [InertiaParams.from_matrix(np.array(j)) for j in FLEET_J]


@pytest.fixture
def fleet_topology():
    return CommTopology(FLEET_ADJ.copy())


@pytest.fixture
def unit_gains():
    return GainSet.from_scalars(1.0, 3.0, 3.0)


def single_craft_scenario(j=None, sigma0=(0.3, -0.2, 0.4), omega0=(0.2, 0.1, -0.3),
                          sigma_ref=(0.1, 0.3, 0.5), perfect=False, dt=0.005,
                          duration=5.0, accel_source="held", **kw):
    """One craft tracking a constant leader it hears directly."""
    j = np.array(j if j is not None else
                 [[1.0, 0.1, 0.2], [0.1, 0.9, 0.3], [0.2, 0.3, 1.1]])
    inertia = InertiaParams.from_matrix(j)
    craft = Spacecraft(
        inertia=inertia,
        initial_state=SpacecraftState(np.array(sigma0), np.array(omega0)),
        gains=GainSet.from_scalars(1.0, 3.0, 3.0),
        theta_hat0=inertia.theta if perfect else np.zeros(6))
    topo = CommTopology(np.zeros((1, 1)), leader_weights=np.array([1.0]))
    return Scenario(
        spacecraft=(craft,), topology=topo, mode="tracking",
        reference=ReferenceTrajectory.constant(list(sigma_ref)),
        dt=dt, duration=duration,
        adaptation_enabled=not perfect, accel_source=accel_source, **kw)


def pair_scenario(duration=2.0, mode="leaderless", **kw):
    """Two craft hearing each other; the smallest valid leaderless fleet."""
    states = [SpacecraftState(np.array([0.2, -0.1, 0.1]), np.array([0.1, 0.0, -0.1])),
              SpacecraftState(np.array([-0.1, 0.2, -0.2]), np.array([0.0, 0.1, 0.1]))]
    craft = []
    for j, st in zip(FLEET_J[:2], states):
        inertia = InertiaParams.from_matrix(np.array(j))
        craft.append(Spacecraft(inertia=inertia, initial_state=st,
                                gains=GainSet.from_scalars(1.0, 3.0, 3.0)))
    topo = CommTopology(np.array([[0.0, 1.0], [1.0, 0.0]]))
    extra = {}
    if mode == "tracking":
        topo = CommTopology(np.array([[0.0, 1.0], [1.0, 0.0]]),
                            leader_weights=np.array([1.0, 0.0]))
        extra["reference"] = ReferenceTrajectory.constant([0.1, 0.0, -0.1])
    return Scenario(spacecraft=tuple(craft), topology=topo, mode=mode,
                    duration=duration, **extra, **kw)


# -- acceptance reporting -------------------------------------------------

ACCEPTANCE_LINES = []


def record_acceptance(number, passed, detail):
    line = "criterion %d: %s  (%s)" % (number, "PASS" if passed else "FAIL", detail)
    ACCEPTANCE_LINES.append((number, line))
    print(line)
    return passed


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(line)
