import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pdectl import (BoundaryControlEnv, ConfigurationError, EpisodeStateError,
                    Grid1D, InitialCondition, RewardSpec1D, RewardSpecNS,
                    reward_ns, reward_step, reward_terminal)
from pdectl import config as config_mod
from pdectl.grids import Grid2D


def small_transport(**over):
    # coarse settings for fast unit tests
    data = {
        "problem": "transport",
        "grid": {"nx": 21},
        "episode": {"horizon": 0.5, "dt_control": 0.05, "dt_pde": 0.01,
                    "action_lo": -20.0, "action_hi": 20.0,
                    "blowup_threshold": 1e4},
        "coefficient": {"gamma_cheb": 7.35, "amplitude": 5.0},
    }
    data.update(over)
    return config_mod.from_mapping(data)


def small_ns(**over):
    data = {
        "problem": "navier-stokes",
        "grid": {"nx": 7, "ny": 7},
        "episode": {"horizon": 0.01, "dt_control": 1e-3, "dt_pde": 1e-3,
                    "action_lo": -10.0, "action_hi": 10.0,
                    "blowup_threshold": 1e4},
        "poisson": {"max_iters": 4000, "tol": 1e-9, "omega": 0.8},
    }
    data.update(over)
    return config_mod.from_mapping(data)


# -- reward operations ----------------------------------------------------------


def test_reward_step_identical_states():
    grid = Grid1D(101)
    u = np.random.default_rng(0).standard_normal(101)
    assert reward_step(u, u, grid) == 0.0


def test_reward_step_frozen_value():
    # prev = 0, next = 1 on nx = 101: -sqrt(101 * 0.01)
    grid = Grid1D(101)
    got = reward_step(np.zeros(101), np.ones(101), grid)
    assert got == pytest.approx(-1.0049875621120890, abs=1e-15)


def test_reward_step_sign_and_symmetry():
    grid = Grid1D(51)
    rng = np.random.default_rng(1)
    a = rng.standard_normal(51)
    b = rng.standard_normal(51)
    assert reward_step(a, b, grid) <= 0
    assert abs(reward_step(a, b, grid)) == abs(reward_step(b, a, grid))


def test_reward_step_length_mismatch():
    with pytest.raises(ValueError):
        reward_step(np.zeros(5), np.zeros(6), Grid1D(5))


def test_reward_terminal_cases():
    grid = Grid1D(101)
    spec = RewardSpec1D(sigma=300.0, eta=1000.0, zeta=20.0)
    # norm above the acceptance threshold: no bonus
    big = np.full(101, 25.0 / np.sqrt(1.01))
    assert reward_terminal(big * 1.01, [5.0], spec, grid) == 0.0
    # zero state, zero control: the full bonus
    assert reward_terminal(np.zeros(101), [0.0, 0.0], spec, grid) == 300.0
    # ||final|| = 1, sum|a| = 1000: 300 - 1 - 1 = 298
    unit = np.ones(101) / np.sqrt(1.01)
    actions = [250.0, -250.0, 250.0, -250.0]
    assert reward_terminal(unit, actions, spec, grid) == pytest.approx(298.0, abs=1e-12)


def test_reward_ns_cases():
    grid = Grid2D(5, 5)
    spec = RewardSpecNS(gamma_ctrl=0.1, a_ref=2.0)
    u = np.random.default_rng(2).standard_normal((5, 5))
    v = np.random.default_rng(3).standard_normal((5, 5))
    assert reward_ns(u, v, u, v, 2.0, spec, grid) == 0.0
    assert reward_ns(u, v, u, v, 3.0, spec, grid) == pytest.approx(-0.05, abs=1e-15)
    assert reward_ns(u, v, v, u, 1.0, spec, grid) <= 0.0


# -- reset ----------------------------------------------------------------------


def test_reset_profile_initial_condition():
    env = BoundaryControlEnv(small_transport())
    obs = env.reset(0, initial=InitialCondition(kind="constant", value=10.0))
    np.testing.assert_array_equal(obs, np.full(21, 10.0))


def test_reset_same_seed_bitwise_identical():
    env = BoundaryControlEnv(small_transport())
    a = env.reset(123456789)
    b = env.reset(123456789)
    np.testing.assert_array_equal(a, b)
    c = env.reset(987654321)
    assert not np.array_equal(a, c)


def test_reset_draws_uniform_constant():
    env = BoundaryControlEnv(small_transport())
    values = [env.reset(seed)[0] for seed in range(200)]
    assert all(1.0 <= v <= 10.0 for v in values)
    assert np.std(values) > 1.0  # actually random, not constant


def test_ns_reset_is_quiescent():
    env = BoundaryControlEnv(small_ns())
    obs = env.reset(0)
    np.testing.assert_array_equal(obs, np.zeros(2 * 7 * 7))


# -- step mechanics ---------------------------------------------------------------


def test_action_clipping_recorded():
    env = BoundaryControlEnv(small_transport())
    env.reset(0)
    out = env.step(25.0)
    assert out.info["applied_action"] == 20.0
    env.reset(0)
    out = env.step(-1e9)
    assert out.info["applied_action"] == -20.0


def test_non_finite_action_rejected():
    env = BoundaryControlEnv(small_transport())
    env.reset(0)
    with pytest.raises(ValueError):
        env.step(float("nan"))


def test_episode_length_and_finish_semantics():
    cfg = small_transport()
    env = BoundaryControlEnv(cfg)
    env.reset(0, initial=InitialCondition(kind="constant", value=1.0))
    n = cfg.episode.n_steps
    for k in range(n):
        out = env.step(0.0)
        assert out.terminated == (k == n - 1)
        assert not out.truncated
    with pytest.raises(EpisodeStateError):
        env.step(0.0)


def test_zero_order_hold_substep_equivalence():
    # dt_control = k dt_pde must equal k manual solver steps with the held input
    cfg = small_transport()
    env = BoundaryControlEnv(cfg)
    env.reset(0, initial=InitialCondition(kind="constant", value=2.0))
    out = env.step(5.0)

    from pdectl.profiles import ChebyshevProfile
    from pdectl.transport import TransportSolver
    grid = Grid1D(21)
    solver = TransportSolver(grid, ChebyshevProfile(7.35, 5.0).sample(grid), 0.01)
    u = np.full(21, 2.0)
    for _ in range(5):
        u = solver.step(u, 5.0)
    np.testing.assert_array_equal(out.info["state"], u)


def test_single_substep_when_rates_match():
    cfg = small_transport(episode={"horizon": 0.5, "dt_control": 0.01,
                                   "dt_pde": 0.01})
    env = BoundaryControlEnv(cfg)
    assert env.n_substeps == 1


def test_blowup_truncation():
    # benchmark resolution: the coarse unit-test grid is too diffusive to
    # exhibit the recirculation instability
    cfg = config_mod.transport_benchmark(
        episode={"horizon": 5.0, "dt_control": 0.01, "dt_pde": 1e-4,
                 "blowup_threshold": 12.0})
    env = BoundaryControlEnv(cfg)
    env.reset(0, initial=InitialCondition(kind="constant", value=10.0))
    truncated = False
    for _ in range(env.n_steps):
        out = env.step(0.0)
        if out.truncated:
            truncated = True
            assert out.info["l2_norm"] > 12.0
            break
    assert truncated
    with pytest.raises(EpisodeStateError):
        env.step(0.0)


def test_determinism_full_episode():
    cfg = small_transport()
    actions = np.sin(np.arange(10.0))

    def run():
        env = BoundaryControlEnv(cfg)
        env.reset(42)
        return [env.step(a) for a in actions]

    outs1, outs2 = run(), run()
    for o1, o2 in zip(outs1, outs2):
        np.testing.assert_array_equal(o1.observation, o2.observation)
        assert o1.reward == o2.reward


# -- observation modes -------------------------------------------------------------


def test_observe_full_state_exact_passthrough():
    env = BoundaryControlEnv(small_transport())
    env.reset(0, initial=InitialCondition(kind="constant", value=7.0))
    np.testing.assert_array_equal(env.observe(), np.full(21, 7.0))


def test_observe_anti_collocated_value():
    cfg = small_transport(sensing={"mode": "anti-collocated-value"})
    env = BoundaryControlEnv(cfg)
    obs = env.reset(0, initial=InitialCondition(kind="constant", value=7.0))
    np.testing.assert_array_equal(obs, [7.0])


def test_observe_anti_collocated_gradient_linear_field():
    cfg = small_transport(grid={"nx": 101},
                          sensing={"mode": "anti-collocated-gradient"})
    env = BoundaryControlEnv(cfg)
    grid = Grid1D(101)
    obs = env.reset(0, initial=InitialCondition(kind="profile", profile=grid.x.copy()))
    assert obs[0] == pytest.approx(1.0, abs=1e-12)


def test_observe_collocated_modes():
    grid = Grid1D(101)
    ramp = InitialCondition(kind="profile", profile=2.0 * grid.x)
    env = BoundaryControlEnv(small_transport(
        grid={"nx": 101}, sensing={"mode": "collocated"}))
    obs = env.reset(0, initial=ramp)
    assert obs[0] == pytest.approx(2.0, abs=1e-12)  # Dirichlet actuation: sense slope
    env = BoundaryControlEnv(small_transport(
        grid={"nx": 101}, sensing={"mode": "collocated"},
        actuation={"edge": "x1", "kind": "neumann"}))
    obs = env.reset(0, initial=ramp)
    assert obs[0] == pytest.approx(2.0, abs=1e-12)  # Neumann actuation: sense value


def test_zero_sigma_gaussian_equals_clean():
    clean = BoundaryControlEnv(small_transport())
    noisy = BoundaryControlEnv(small_transport(
        sensing={"mode": "full-state",
                 "noise": {"kind": "gaussian", "sigma": 0.0}}))
    a = clean.reset(7)
    b = noisy.reset(7)
    np.testing.assert_array_equal(a, b)


def test_gaussian_noise_is_seeded_and_applied():
    cfg = small_transport(sensing={"mode": "full-state",
                                   "noise": {"kind": "gaussian", "sigma": 0.5}})
    env = BoundaryControlEnv(cfg)
    a = env.reset(3, initial=InitialCondition(kind="constant", value=1.0))
    env2 = BoundaryControlEnv(cfg)
    b = env2.reset(3, initial=InitialCondition(kind="constant", value=1.0))
    np.testing.assert_array_equal(a, b)
    assert np.std(a - 1.0) > 0.1  # noise actually present


# -- configuration validation -------------------------------------------------------


def test_unsupported_sensing_cell_rejected():
    with pytest.raises(ConfigurationError) as err:
        config_mod.from_mapping({
            "problem": "reaction-diffusion",
            "grid": {"nx": 41},
            "episode": {"horizon": 0.1, "dt_control": 0.01, "dt_pde": 1e-4},
            "coefficient": {"gamma_cheb": 8.0, "amplitude": 50.0},
            "sensing": {"mode": "anti-collocated-value"},
        })
    assert "reaction-diffusion" in str(err.value)


def test_actuation_x0_rejected():
    with pytest.raises(ConfigurationError):
        small_transport(actuation={"edge": "x0", "kind": "dirichlet"})


def test_ns_rejects_neumann_and_partial_sensing():
    with pytest.raises(ConfigurationError):
        small_ns(actuation={"edge": "top", "kind": "neumann"})
    with pytest.raises(ConfigurationError):
        small_ns(sensing={"mode": "collocated"})


def test_dt_divisibility_enforced():
    with pytest.raises(ConfigurationError):
        small_transport(episode={"horizon": 0.5, "dt_control": 0.03,
                                 "dt_pde": 0.01})


def test_config_roundtrip():
    for preset in config_mod.PRESETS.values():
        cfg = preset()
        data = config_mod.to_mapping(cfg)
        again = config_mod.to_mapping(config_mod.from_mapping(data))
        assert data == again


def test_config_from_files(tmp_path):
    import json
    cfg = config_mod.transport_benchmark()
    data = config_mod.to_mapping(cfg)
    jpath = tmp_path / "c.json"
    jpath.write_text(json.dumps(data))
    assert config_mod.to_mapping(config_mod.from_file(jpath)) == data

    tpath = tmp_path / "c.toml"
    lines = ['problem = "transport"', "metric_norm = \"rectangle\"",
             "[grid]", "nx = 101",
             "[episode]", "horizon = 5.0", "dt_control = 0.01", "dt_pde = 1e-4",
             "blowup_threshold = 30.0",
             "[coefficient]", "gamma_cheb = 7.35", "amplitude = 5.0"]
    tpath.write_text("\n".join(lines))
    cfg2 = config_mod.from_file(tpath)
    assert cfg2.episode.blowup_threshold == 30.0
    assert cfg2.gamma_cheb == 7.35


# -- property tests ------------------------------------------------------------------


@given(action=st.floats(min_value=-1e6, max_value=1e6, allow_nan=False))
@settings(max_examples=40, deadline=None)
def test_applied_action_always_in_bounds(action):
    env = BoundaryControlEnv(small_transport())
    env.reset(0, initial=InitialCondition(kind="constant", value=1.0))
    out = env.step(action)
    assert -20.0 <= out.info["applied_action"] <= 20.0


@given(seed=st.integers(min_value=0, max_value=2**64 - 1))
@settings(max_examples=25, deadline=None)
def test_seeds_are_u64_and_deterministic(seed):
    env = BoundaryControlEnv(small_transport())
    a = env.reset(seed)
    b = env.reset(seed)
    np.testing.assert_array_equal(a, b)


@given(data=st.lists(st.floats(min_value=-5, max_value=5, allow_nan=False),
                     min_size=21, max_size=21))
@settings(max_examples=25, deadline=None)
def test_reward_step_metric_properties(data):
    grid = Grid1D(21)
    u = np.array(data)
    v = np.zeros(21)
    assert reward_step(u, u, grid) == 0.0
    assert reward_step(u, v, grid) == reward_step(v, u, grid) <= 0.0
