"""Environment adapter: pdectl episodes behind the standard RL interface."""

import numpy as np

from pdectl import BoundaryControlEnv
from pdectl import config as config_mod
from pdectl.errors import ConfigurationError, EpisodeStateError

from ._compat import Box, Env

ENV_PRESETS = {
    "transport": config_mod.transport_benchmark,
    "reaction-diffusion": config_mod.reaction_diffusion_benchmark,
    "navier-stokes": config_mod.navier_stokes_benchmark,
}

_SCHEMA_KEYS = {
    "problem", "grid", "episode", "actuation", "sensing", "coefficient",
    "reward", "fluid", "poisson", "reference", "metric_norm", "initial",
}


class PdeBoundaryControlEnv(Env):
    """One boundary-controlled PDE episode at a time.

    ``reset(seed=...)`` returns (observation, info); ``step(action)`` returns
    (observation, reward, terminated, truncated, info). Actions are scalars
    wrapped in a shape-(1,) box with the configured bounds; observations are
    flat float64 vectors (2D fields flattened row-major, with the grid shape
    exposed in info["shape"]).
    """

    metadata = {"render_modes": []}

    def __init__(self, config):
        if isinstance(config, dict):
            config = config_mod.from_mapping(config)
        self._core = BoundaryControlEnv(config)
        ep = config.episode
        self.action_space = Box(low=ep.action_lo, high=ep.action_hi, shape=(1,),
                                dtype=np.float64)
        n = self._core.observation_size()
        self.observation_space = Box(low=-np.inf, high=np.inf, shape=(n,),
                                     dtype=np.float64)
        self._entropy = np.random.default_rng()
        self._episode_open = False

    @property
    def core(self):
        return self._core

    def _info(self):
        info = {"t": self._core.time, "l2_norm": self._core.state_norm()}
        if not self._core.is_1d:
            info["shape"] = (self._core.grid.nx, self._core.grid.ny)
        return info

    def reset(self, *, seed=None, options=None):
        if seed is None:
            seed = int(self._entropy.integers(0, 2**63))
        obs = self._core.reset(seed)
        self._episode_open = True
        return np.asarray(obs, dtype=np.float64), self._info()

    def step(self, action):
        if not self._episode_open:
            raise EpisodeStateError("episode is finished; call reset() first")
        action = np.asarray(action, dtype=np.float64).reshape(-1)
        if action.shape != (1,):
            raise ValueError(f"action must be a scalar, got shape {action.shape}")
        out = self._core.step(float(action[0]))
        if out.terminated or out.truncated:
            self._episode_open = False
        info = self._info()
        info["applied_action"] = out.info["applied_action"]
        return (np.asarray(out.observation, dtype=np.float64), float(out.reward),
                bool(out.terminated), bool(out.truncated), info)


def make(env_id, config=None):
    """Build a bindings environment from a preset id plus optional overrides.

    ``config`` is a mapping in the pdectl config schema; unknown top-level
    keys are rejected by name.
    """
    if env_id not in ENV_PRESETS:
        raise ConfigurationError(
            f"unknown environment id {env_id!r}; expected one of "
            f"{sorted(ENV_PRESETS)}")
    overrides = dict(config or {})
    bad = set(overrides) - _SCHEMA_KEYS
    if bad:
        raise ConfigurationError(
            f"unknown config keys {sorted(bad)}; the schema allows "
            f"{sorted(_SCHEMA_KEYS)}")
    cfg = ENV_PRESETS[env_id](**overrides)
    return PdeBoundaryControlEnv(cfg)
