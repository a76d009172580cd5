"""Environment-interface compatibility layer.

When the ``gymnasium`` package is importable, its ``Env`` base class and
``Box`` space are used directly so the bindings register with real trainers.
Otherwise a minimal stand-in with the same call signatures and semantics is
provided; it covers everything the bindings and the conformance checks need
(bounded float Box spaces, seeded sampling, containment, the five-tuple step
contract).
"""

import numpy as np

try:  # pragma: no cover - exercised only when gymnasium is installed
    import gymnasium

    HAVE_GYMNASIUM = True
    Env = gymnasium.Env
    Box = gymnasium.spaces.Box

    def register(env_id, entry_point):
        gymnasium.register(id=env_id, entry_point=entry_point)

except ModuleNotFoundError:
    HAVE_GYMNASIUM = False

    class Box:
        """Bounded (or unbounded) float box with the standard attributes."""

        def __init__(self, low, high, shape, dtype=np.float64):
            self.shape = tuple(shape)
            self.dtype = np.dtype(dtype)
            self.low = np.broadcast_to(np.asarray(low, dtype=self.dtype),
                                       self.shape).copy()
            self.high = np.broadcast_to(np.asarray(high, dtype=self.dtype),
                                        self.shape).copy()
            if not np.all(self.low <= self.high):
                raise ValueError("Box needs low <= high")
            self._rng = np.random.default_rng()

        def seed(self, seed=None):
            self._rng = np.random.default_rng(seed)
            return [seed]

        def sample(self):
            out = np.empty(self.shape, dtype=self.dtype)
            bounded = np.isfinite(self.low) & np.isfinite(self.high)
            out[bounded] = self._rng.uniform(self.low[bounded], self.high[bounded])
            out[~bounded] = self._rng.standard_normal(int(np.sum(~bounded)))
            return out

        def contains(self, x):
            x = np.asarray(x)
            return (x.shape == self.shape and bool(np.all(x >= self.low))
                    and bool(np.all(x <= self.high)))

        def __contains__(self, x):
            return self.contains(x)

        def __repr__(self):
            return f"Box(shape={self.shape}, dtype={self.dtype})"

    class Env:
        """Skeleton of the de-facto episodic environment interface."""

        metadata = {"render_modes": []}
        action_space = None
        observation_space = None
        render_mode = None

        def reset(self, *, seed=None, options=None):
            raise NotImplementedError

        def step(self, action):
            raise NotImplementedError

        def render(self):
            return None

        def close(self):
            pass

        @property
        def unwrapped(self):
            return self

    _REGISTRY = {}

    def register(env_id, entry_point):
        _REGISTRY[env_id] = entry_point
