import numpy as np
import pytest

import pdectl_gym
from pdectl.errors import ConfigurationError, EpisodeStateError
from pdectl_gym import check_env, make, parity_check


FAST_1D = {
    "grid": {"nx": 41},
    "episode": {"horizon": 0.2, "dt_control": 0.01, "dt_pde": 2e-3,
                "action_lo": -20.0, "action_hi": 20.0,
                "blowup_threshold": 1e4},
}

FAST_NS = {
    "grid": {"nx": 7, "ny": 7},
    "episode": {"horizon": 0.01, "dt_control": 1e-3, "dt_pde": 1e-3,
                "action_lo": -10.0, "action_hi": 10.0,
                "blowup_threshold": 1e4},
    "poisson": {"max_iters": 2000, "tol": 1e-8, "omega": 0.8},
}


# -- B1: interface conformance with the benchmark action bounds -----------------


def test_b1_conformance_transport():
    env = make("transport", FAST_1D)
    assert env.action_space.low[0] == -20.0 and env.action_space.high[0] == 20.0
    check_env(env)


def test_b1_conformance_reaction_diffusion():
    env = make("reaction-diffusion", {
        "grid": {"nx": 41},
        "episode": {"horizon": 0.02, "dt_control": 1e-3, "dt_pde": 2e-4,
                    "action_lo": -20.0, "action_hi": 20.0,
                    "blowup_threshold": 1e4},
    })
    assert env.action_space.low[0] == -20.0 and env.action_space.high[0] == 20.0
    check_env(env)


def test_b1_conformance_navier_stokes():
    env = make("navier-stokes", FAST_NS)
    assert env.action_space.low[0] == -10.0 and env.action_space.high[0] == 10.0
    check_env(env)


def test_benchmark_observation_lengths():
    assert make("transport").observation_space.shape == (101,)
    assert make("reaction-diffusion").observation_space.shape == (201,)


def test_benchmark_action_bounds():
    assert make("transport").action_space.high[0] == 20.0
    assert make("navier-stokes", FAST_NS).action_space.high[0] == 10.0


def test_unknown_env_id():
    with pytest.raises(ConfigurationError):
        make("burgers")


def test_bad_config_key_named():
    with pytest.raises(ConfigurationError) as err:
        make("transport", {"gird": {"nx": 11}})
    assert "gird" in str(err.value)


def test_finished_episode_raises():
    env = make("transport", FAST_1D)
    env.reset(seed=0)
    for _ in range(20):
        env.step([0.0])
    with pytest.raises(EpisodeStateError):
        env.step([0.0])


def test_no_state_leakage_between_handles():
    a = make("transport", FAST_1D)
    b = make("transport", FAST_1D)
    obs_a0, _ = a.reset(seed=1)
    obs_b0, _ = b.reset(seed=2)
    a.step([3.0])
    obs_b1, _ = b.reset(seed=2)
    np.testing.assert_array_equal(obs_b0, obs_b1)


def test_2d_observation_is_flat_with_shape_in_info():
    env = make("navier-stokes", FAST_NS)
    obs, info = env.reset(seed=0)
    assert obs.shape == (2 * 7 * 7,)
    assert info["shape"] == (7, 7)


def test_registration_hook_runs():
    pdectl_gym.register_all()


# -- B2: parity with runner trajectories ------------------------------------------


def run_cli_episode(tmp_path, controller, seed):
    from pdectl import config as config_mod
    from pdectl.runner import RunManifest, run_episode
    cfg = config_mod.transport_benchmark(**{
        "grid": FAST_1D["grid"], "episode": FAST_1D["episode"]})
    manifest = RunManifest(environment=cfg, controller=controller, seed=seed,
                           out_dir=str(tmp_path / "run"),
                           initial={"kind": "constant", "value": 2.0})
    run_episode(manifest)
    return tmp_path / "run" / "trajectory.csv"


def replay_env(tmp_path):
    overrides = dict(FAST_1D)
    overrides["initial"] = {"kind": "constant", "value": 2.0}
    return make("transport", overrides)


def test_b2_parity_zero_actions(tmp_path):
    csv = run_cli_episode(tmp_path, {"id": "zero"}, seed=5)
    report = parity_check(replay_env(tmp_path), csv, seed=5)
    assert report.matches, report.details


def test_b2_parity_backstepping_replay(tmp_path):
    csv = run_cli_episode(tmp_path, {"id": "backstepping"}, seed=9)
    report = parity_check(replay_env(tmp_path), csv, seed=9)
    assert report.matches, report.details


def test_b2_perturbed_action_reports_divergence(tmp_path):
    csv = run_cli_episode(tmp_path, {"id": "constant", "value": 1.0}, seed=3)
    text = csv.read_text().split("\n")
    row = text[3].split(",")
    row[1] = repr(float(row[1]) + 1e-9)
    text[3] = ",".join(row)
    bad = tmp_path / "perturbed.csv"
    bad.write_text("\n".join(text))
    report = parity_check(replay_env(tmp_path), bad, seed=3)
    assert not report.matches
    assert report.first_divergence == 2  # header + t=0 row precede step rows
