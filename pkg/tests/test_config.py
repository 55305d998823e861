"""Declarative scenario configs: parsing, presets, round trips, errors."""
import numpy as np
import pytest

from attsync.config import (
    DEFAULT_BOUND,
    DEFAULT_DT,
    DEFAULT_DURATION,
    ScenarioConfig,
    preset,
    preset_names,
)
from attsync.errors import ConfigError
from tests.conftest import FLEET_ADJ, FLEET_J, FLEET_LEADER_B


def minimal_dict(mode="leaderless", n=2, **extra):
    data = {
        "mode": mode,
        "topology": {"adjacency": [[0.0, 1.0], [1.0, 0.0]][:n]},
        "spacecraft": [{"inertia": FLEET_J[i]} for i in range(n)],
    }
    if mode == "tracking":
        data["topology"]["leader_weights"] = [1.0] + [0.0] * (n - 1)
        data["reference"] = {"kind": "constant", "value": [0.1, 0.3, 0.5]}
    data.update(extra)
    return data


def scenarios_equal(a, b):
    if (a.mode, a.dt, a.duration, a.seed, a.shadow_switch, a.accel_source,
            a.smoothing_rate, a.rate_leak) != \
       (b.mode, b.dt, b.duration, b.seed, b.shadow_switch, b.accel_source,
            b.smoothing_rate, b.rate_leak):
        return False
    if not np.array_equal(a.topology.adjacency, b.topology.adjacency):
        return False
    if (a.topology.leader_weights is None) != (b.topology.leader_weights is None):
        return False
    if a.topology.leader_weights is not None and not np.array_equal(
            a.topology.leader_weights, b.topology.leader_weights):
        return False
    if (a.reference is None) != (b.reference is None):
        return False
    if a.reference is not None:
        ra, rb = a.reference, b.reference
        if ra.kind != rb.kind:
            return False
        for name in ("value", "amplitude", "frequency", "phase", "offset"):
            va, vb = getattr(ra, name), getattr(rb, name)
            if (va is None) != (vb is None):
                return False
            if va is not None and not np.array_equal(va, vb):
                return False
    if len(a.spacecraft) != len(b.spacecraft):
        return False
    for ca, cb in zip(a.spacecraft, b.spacecraft):
        if not (np.array_equal(ca.inertia.matrix, cb.inertia.matrix)
                and np.array_equal(ca.initial_state.sigma, cb.initial_state.sigma)
                and np.array_equal(ca.initial_state.omega, cb.initial_state.omega)
                and np.array_equal(ca.theta_hat0, cb.theta_hat0)
                and np.array_equal(ca.gains.Lambda, cb.gains.Lambda)
                and np.array_equal(ca.gains.K, cb.gains.K)
                and np.array_equal(ca.gains.Gamma, cb.gains.Gamma)):
            return False
    return True


# ---------------------------------------------------------------- presets


def test_preset_names():
    assert preset_names() == ["paper-leaderless", "paper-tracking"]


def test_unknown_preset_lists_available():
    with pytest.raises(ConfigError) as exc:
        preset("paper-formation")
    message = str(exc.value)
    assert "paper-leaderless" in message and "paper-tracking" in message


def test_leaderless_preset_contents():
    cfg = preset("paper-leaderless")
    assert cfg.mode == "leaderless" and cfg.n == 6
    assert cfg.dt == DEFAULT_DT and cfg.duration == DEFAULT_DURATION
    assert cfg.seed == 0 and cfg.leader_weights is None and cfg.reference is None
    assert cfg.sigma_bound == DEFAULT_BOUND and cfg.omega_bound == DEFAULT_BOUND
    assert np.array_equal(cfg.adjacency, FLEET_ADJ)
    for inertia, j in zip(cfg.inertias, FLEET_J):
        assert np.array_equal(inertia.matrix, np.array(j))
    for g in cfg.gains:
        assert np.array_equal(g.Lambda, np.eye(3))
        assert np.array_equal(g.K, 3.0 * np.eye(3))
        assert np.array_equal(g.Gamma, 3.0 * np.eye(6))
    for th0 in cfg.theta_hat0:
        assert np.array_equal(th0, np.zeros(6))
    assert all(state is None for state in cfg.initial_states)
    assert cfg.accel_source == "smoothed"
    assert cfg.shadow_switch and cfg.rate_leak > 0.0


def test_tracking_preset_contents():
    cfg = preset("paper-tracking")
    assert cfg.mode == "tracking" and cfg.n == 6
    assert np.array_equal(cfg.leader_weights, FLEET_LEADER_B)
    assert cfg.reference.kind == "constant"
    assert np.array_equal(cfg.reference.value, [0.1, 0.3, 0.5])
    assert np.array_equal(cfg.adjacency, FLEET_ADJ)
    assert not cfg.shadow_switch and cfg.rate_leak == 0.0


@pytest.mark.parametrize("name", ["paper-leaderless", "paper-tracking"])
def test_preset_round_trip_yaml(name):
    cfg = preset(name)
    again = ScenarioConfig.from_yaml(cfg.to_yaml())
    assert scenarios_equal(cfg.to_scenario(), again.to_scenario())


def test_preset_scenarios_validate():
    for name in preset_names():
        sc = preset(name).to_scenario()
        assert sc.n == 6 and sc.n_steps == 8000


# ---------------------------------------------------------------- parsing


def test_scalar_gain_shorthand():
    cfg = ScenarioConfig.from_dict(minimal_dict(gains={"K": 3.0}))
    for g in cfg.gains:
        assert np.array_equal(g.K, 3.0 * np.eye(3))
        assert np.array_equal(g.Lambda, np.eye(3))  # default 1.0 shorthand
        assert np.array_equal(g.Gamma, np.eye(6))


def test_gamma_diagonal_shorthand():
    cfg = ScenarioConfig.from_dict(
        minimal_dict(gains={"Gamma": [1.0, 2.0, 3.0, 4.0, 5.0, 6.0]})
    )
    assert np.array_equal(cfg.gains[0].Gamma, np.diag([1.0, 2, 3, 4, 5, 6]))


def test_per_craft_gain_list():
    cfg = ScenarioConfig.from_dict(
        minimal_dict(gains=[{"K": 2.0}, {"K": 4.0}])
    )
    assert np.array_equal(cfg.gains[0].K, 2.0 * np.eye(3))
    assert np.array_equal(cfg.gains[1].K, 4.0 * np.eye(3))
    with pytest.raises(ConfigError):
        ScenarioConfig.from_dict(minimal_dict(gains=[{"K": 2.0}]))


def test_inertia_as_packed_vector_matches_matrix_form():
    j = np.array(FLEET_J[1])
    # packed upper triangle, row by row: [J11, J12, J13, J22, J23, J33]
    theta = [j[0, 0], j[0, 1], j[0, 2], j[1, 1], j[1, 2], j[2, 2]]
    data = minimal_dict()
    data["spacecraft"][1] = {"theta": theta}
    cfg = ScenarioConfig.from_dict(data)
    assert np.allclose(cfg.inertias[1].matrix, j, atol=1e-15)


def test_explicit_and_random_initial_states():
    data = minimal_dict(seed=42)
    data["spacecraft"][0]["initial"] = {"sigma": [0.1, 0.2, 0.3],
                                        "omega": [0.0, -0.1, 0.0]}
    cfg = ScenarioConfig.from_dict(data)
    sc = cfg.to_scenario()
    assert np.array_equal(sc.spacecraft[0].initial_state.sigma, [0.1, 0.2, 0.3])
    # the other craft's draw is seed-stable whether or not craft 0 is explicit
    all_random = ScenarioConfig.from_dict(minimal_dict(seed=42)).to_scenario()
    assert np.array_equal(sc.spacecraft[1].initial_state.sigma,
                          all_random.spacecraft[1].initial_state.sigma)
    assert np.array_equal(sc.spacecraft[1].initial_state.omega,
                          all_random.spacecraft[1].initial_state.omega)
    # and different seeds change the random craft
    other = ScenarioConfig.from_dict(minimal_dict(seed=43)).to_scenario()
    assert not np.array_equal(sc.spacecraft[1].initial_state.sigma,
                              other.spacecraft[1].initial_state.sigma)


def test_random_bounds_respected():
    data = minimal_dict(seed=3, random_bounds={"sigma": 0.2, "omega": 0.05})
    sc = ScenarioConfig.from_dict(data).to_scenario()
    for craft in sc.spacecraft:
        assert np.linalg.norm(craft.initial_state.sigma) <= 0.2
        assert np.linalg.norm(craft.initial_state.omega) <= 0.05


def test_generator_tuning_keys():
    data = minimal_dict(accel_source="held")
    cfg = ScenarioConfig.from_dict(data)
    assert cfg.accel_source == "held"
    cfg = ScenarioConfig.from_dict(minimal_dict(smoothing_rate=2.5, rate_leak=0.1))
    assert cfg.smoothing_rate == 2.5 and cfg.rate_leak == 0.1
    sc = cfg.to_scenario()
    assert sc.smoothing_rate == 2.5 and sc.rate_leak == 0.1
    echoed = cfg.to_dict()
    assert echoed["smoothing_rate"] == 2.5 and echoed["rate_leak"] == 0.1


def test_with_overrides():
    cfg = preset("paper-leaderless").with_overrides(dt=0.01, duration=10.0, seed=7)
    assert cfg.dt == 0.01 and cfg.duration == 10.0 and cfg.seed == 7
    sc = cfg.to_scenario()
    assert sc.dt == 0.01 and sc.duration == 10.0


# ------------------------------------------------------------ error paths


def error_message(data):
    with pytest.raises(ConfigError) as exc:
        ScenarioConfig.from_dict(data)
    return str(exc.value)


def test_missing_required_fields():
    assert "mode" in error_message({"topology": {}, "spacecraft": []})
    data = minimal_dict()
    del data["topology"]
    assert "topology" in error_message(data)
    data = minimal_dict()
    del data["spacecraft"]
    assert "spacecraft" in error_message(data)


def test_unknown_top_level_key():
    assert "integrator" in error_message(minimal_dict(integrator="rk4"))


def test_bad_mode_and_accel_source():
    assert "mode" in error_message(minimal_dict(mode="formation"))
    assert "accel_source" in error_message(minimal_dict(accel_source="spline"))


def test_field_path_in_craft_errors():
    data = minimal_dict(n=2)
    data["spacecraft"][1] = {"inertia": [[1, 0], [0, 1]]}
    assert "spacecraft[1].inertia" in error_message(data)
    data = minimal_dict(n=2)
    data["spacecraft"][1] = {"inertia": FLEET_J[0], "theta": [1, 1, 1, 0, 0, 0]}
    assert "spacecraft[1]" in error_message(data)
    data = minimal_dict(n=2)
    data["spacecraft"][1] = {}
    assert "spacecraft[1]" in error_message(data)
    data = minimal_dict(n=2)
    data["spacecraft"][1] = {"inertia": [[-1, 0, 0], [0, 1, 0], [0, 0, 1]]}
    assert "spacecraft[1]" in error_message(data)
    assert "positive definite" in error_message(data)


def test_adjacency_and_leader_shape_errors():
    data = minimal_dict()
    data["topology"]["adjacency"] = [[0.0, 1.0]]
    assert "topology.adjacency" in error_message(data)
    data = minimal_dict(mode="tracking")
    data["topology"]["leader_weights"] = [1.0]
    assert "topology.leader_weights" in error_message(data)


def test_reference_errors():
    data = minimal_dict(mode="tracking")
    data["reference"] = {"kind": "spline"}
    assert "reference.kind" in error_message(data)
    data = minimal_dict(mode="tracking")
    data["reference"] = {"kind": "sinusoid", "amplitude": 0.1}
    assert "reference.frequency" in error_message(data)


def test_scalar_field_errors():
    assert "dt" in error_message(minimal_dict(dt="fast"))
    assert "seed" in error_message(minimal_dict(seed="lucky"))
    assert "decimate" in error_message(minimal_dict(decimate=0))
    assert "shadow_switch" in error_message(minimal_dict(shadow_switch="yes"))
    assert "gains.K" in error_message(minimal_dict(gains={"K": "stiff"}))


def test_yaml_parse_error():
    with pytest.raises(ConfigError):
        ScenarioConfig.from_yaml("mode: [unclosed")


def test_config_validity_checked_at_scenario_build():
    # a parseable config can still describe an invalid topology; the
    # build step raises with the validity-condition explanation
    data = minimal_dict()
    data["topology"]["adjacency"] = [[0.0, 0.0], [1.0, 0.0]]
    cfg = ScenarioConfig.from_dict(data)
    with pytest.raises(ConfigError):
        cfg.to_scenario()
