"""Environment-interface conformance checks.

When gymnasium is installed its own ``check_env`` runs; otherwise the vendored
checker below applies the same core contract: space declarations, the
reset/step signatures and return tuples, observation containment, seeded
determinism, and action-space sampling.
"""

import numpy as np

from ._compat import HAVE_GYMNASIUM, Box


class ConformanceError(AssertionError):
    pass


def _require(cond, message):
    if not cond:
        raise ConformanceError(message)


def check_env(env, episodes=2, max_steps=25):
    """Raise ConformanceError (or gymnasium's errors) on contract violations."""
    if HAVE_GYMNASIUM:  # pragma: no cover - exercised only with gymnasium
        from gymnasium.utils.env_checker import check_env as gym_check
        gym_check(env.unwrapped, skip_render_check=True)
        return

    _require(env.action_space is not None, "action_space is not declared")
    _require(env.observation_space is not None, "observation_space is not declared")
    _require(isinstance(env.action_space, Box), "action_space must be a Box")
    _require(isinstance(env.observation_space, Box),
             "observation_space must be a Box")
    _require(np.all(env.action_space.low < env.action_space.high),
             "action bounds must satisfy low < high")

    # reset returns (obs, info); same seed, same observation
    out = env.reset(seed=0)
    _require(isinstance(out, tuple) and len(out) == 2,
             "reset must return (observation, info)")
    obs, info = out
    _require(isinstance(info, dict), "reset info must be a dict")
    _require(env.observation_space.contains(np.asarray(obs)),
             "reset observation is outside the declared space")
    obs2, _ = env.reset(seed=0)
    _require(np.array_equal(np.asarray(obs), np.asarray(obs2)),
             "reset(seed) must be deterministic")

    env.action_space.seed(123)
    for ep in range(episodes):
        env.reset(seed=ep)
        for _ in range(max_steps):
            action = env.action_space.sample()
            out = env.step(action)
            _require(isinstance(out, tuple) and len(out) == 5,
                     "step must return a 5-tuple")
            obs, reward, terminated, truncated, info = out
            _require(env.observation_space.contains(np.asarray(obs)),
                     "step observation is outside the declared space")
            _require(isinstance(float(reward), float) and np.isfinite(reward)
                     or truncated, "reward must be a finite float")
            _require(isinstance(terminated, bool) and isinstance(truncated, bool),
                     "terminated/truncated must be plain bools")
            _require(isinstance(info, dict), "step info must be a dict")
            if terminated or truncated:
                break
