"""Episodic reset/step layer shared by the three solvers.

An environment holds one episode at a time. ``step`` clips the incoming
action into the configured bounds, holds it constant while the solver
advances ``dt_control / dt_pde`` internal steps (zero-order hold), computes
the reward, and applies the termination and blow-up rules:

* terminated -- the horizon was reached (exactly round(horizon / dt_control)
  step calls); for the 1D problems the terminal bonus is added on that step;
* truncated -- the canonical (rectangle-rule) state norm exceeded the guard
  threshold, or a non-finite entry appeared. If both conditions land on the
  same step, terminated wins and the terminal bonus is still paid.

Observations are extracted per the sensing mode, then optional Gaussian
sensor noise is added; dynamics are never perturbed. All randomness (initial
condition draw, sensor noise) derives from the reset seed, so identical
(config, seed, action sequence) produce bit-identical outcomes.
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import ConfigurationError, EpisodeStateError
from .grids import Grid1D, Grid2D
from .norms import l2_norm_1d, l2_norm_2d, l2_sq_2d
from .profiles import ChebyshevProfile
from .reaction_diffusion import ReactionDiffusionSolver
from .transport import TransportSolver
from .ns2d import (FluidParams, NavierStokes2D, PoissonSettings,
                   default_lid_schedule, make_reference)

PROBLEMS = ("transport", "reaction-diffusion", "navier-stokes")
SENSING_MODES = ("full-state", "collocated", "anti-collocated-value",
                 "anti-collocated-gradient")


@dataclass(frozen=True)
class ActuationSpec:
    edge: str = "x1"
    kind: str = "dirichlet"


@dataclass(frozen=True)
class NoiseSpec:
    kind: str = "none"
    sigma: float = 0.0
    seed: Optional[int] = None

    def __post_init__(self):
        if self.kind not in ("none", "gaussian"):
            raise ConfigurationError(f"unknown noise kind {self.kind!r}")
        if self.sigma < 0:
            raise ConfigurationError("noise sigma must be >= 0")


@dataclass(frozen=True)
class SensingSpec:
    mode: str = "full-state"
    noise: NoiseSpec = field(default_factory=NoiseSpec)

    def __post_init__(self):
        if self.mode not in SENSING_MODES:
            raise ConfigurationError(
                f"unknown sensing mode {self.mode!r}; expected one of {SENSING_MODES}")


@dataclass(frozen=True)
class EpisodeConfig:
    horizon: float
    dt_control: float
    dt_pde: float
    action_lo: float = -20.0
    action_hi: float = 20.0
    blowup_threshold: float = 1e4

    def __post_init__(self):
        if self.dt_pde > self.dt_control * (1 + 1e-12):
            raise ConfigurationError("dt_pde must not exceed dt_control")
        if self.action_lo >= self.action_hi:
            raise ConfigurationError("need action_lo < action_hi")
        for whole, part, name in ((self.horizon, self.dt_control, "horizon/dt_control"),
                                  (self.dt_control, self.dt_pde, "dt_control/dt_pde")):
            ratio = whole / part
            if abs(ratio - round(ratio)) > 1e-9 * ratio:
                raise ConfigurationError(f"{name} = {ratio} is not an integer")

    @property
    def n_steps(self):
        return int(round(self.horizon / self.dt_control))

    @property
    def n_substeps(self):
        return int(round(self.dt_control / self.dt_pde))


@dataclass(frozen=True)
class RewardSpec1D:
    """Stabilization reward: per step -||s' - s||, at the horizon a bonus of
    sigma - (1/eta) * sum|a| - ||s_T|| paid only when ||s_T|| <= zeta."""

    sigma: float = 300.0
    eta: float = 1000.0
    zeta: float = 20.0
    norm: str = "rectangle"

    def __post_init__(self):
        if min(self.sigma, self.eta, self.zeta) <= 0:
            raise ConfigurationError("sigma, eta, zeta must be positive")


@dataclass(frozen=True)
class RewardSpecNS:
    """Tracking reward: -(1/2)||s' - ref||^2 - (gamma/2)(a - a_ref)^2 with the
    squared rectangle-rule norm over both velocity components."""

    gamma_ctrl: float = 0.1
    a_ref: float = 2.0

    def __post_init__(self):
        if self.gamma_ctrl < 0:
            raise ConfigurationError("gamma_ctrl must be >= 0")


@dataclass(frozen=True)
class InitialCondition:
    """Episode start: a seeded Uniform(lo, hi) constant, a fixed constant, or
    a caller-supplied profile vector."""

    kind: str = "random-constant"
    value: float = 0.0
    lo: float = 1.0
    hi: float = 10.0
    profile: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.kind not in ("random-constant", "constant", "profile"):
            raise ConfigurationError(f"unknown initial condition kind {self.kind!r}")
        if self.kind == "profile" and self.profile is None:
            raise ConfigurationError("profile initial condition needs a vector")


@dataclass
class StepOutcome:
    observation: np.ndarray
    reward: float
    terminated: bool
    truncated: bool
    info: dict


# -- reward operations ------------------------------------------------------


def reward_step(prev, new, grid, kind="rectangle"):
    """-||new - prev|| in the requested norm convention."""
    prev = np.asarray(prev)
    new = np.asarray(new)
    if prev.shape != new.shape:
        raise ValueError(f"state shapes differ: {prev.shape} vs {new.shape}")
    return -l2_norm_1d(new - prev, grid.dx, kind)


def reward_terminal(final, actions, spec, grid):
    """Terminal bonus, zero unless the final norm is within the acceptance
    threshold. Actions are the per-control-step inputs, not internal substeps."""
    n = l2_norm_1d(final, grid.dx, spec.norm)
    if n > spec.zeta:
        return 0.0
    return spec.sigma - float(np.sum(np.abs(np.asarray(actions)))) / spec.eta - n


def reward_ns(u, v, ref_u, ref_v, action, spec, grid):
    """Tracking reward for one step against the reference frame."""
    if u.shape != ref_u.shape or v.shape != ref_v.shape:
        raise ValueError("state and reference shapes differ")
    dev = l2_sq_2d(u - ref_u, v - ref_v, grid.dx, grid.dy)
    return -0.5 * dev - 0.5 * spec.gamma_ctrl * (action - spec.a_ref) ** 2


# -- environment -------------------------------------------------------------


class BoundaryControlEnv:
    """Uniform episodic interface over the three PDE solvers.

    Construct from an :class:`pdectl.config.EnvConfig`; call ``reset(seed)``
    then ``step(action)`` until terminated or truncated. Instances are
    strictly sequential but independent of each other.
    """

    def __init__(self, config, reference=None):
        from .config import validate_combination  # local import to avoid a cycle
        validate_combination(config)
        self.config = config
        ep = config.episode
        self.n_steps = ep.n_steps
        self.n_substeps = ep.n_substeps

        if config.problem == "transport":
            self.grid = Grid1D(config.nx)
            profile = ChebyshevProfile(config.gamma_cheb, config.amplitude)
            self.solver = TransportSolver(self.grid, profile.sample(self.grid),
                                          ep.dt_pde, kind=config.actuation.kind)
            self.reference = None
        elif config.problem == "reaction-diffusion":
            self.grid = Grid1D(config.nx)
            profile = ChebyshevProfile(config.gamma_cheb, config.amplitude)
            self.solver = ReactionDiffusionSolver(self.grid, profile.sample(self.grid),
                                                  ep.dt_pde, kind=config.actuation.kind)
            self.reference = None
        else:
            self.grid = Grid2D(config.nx, config.ny)
            self.solver = NavierStokes2D(self.grid, config.fluid, config.poisson,
                                         dt=ep.dt_pde, edge=config.actuation.edge)
            if reference is None:
                schedule = default_lid_schedule(ep.horizon, ep.dt_control,
                                                *config.reference_schedule)
                reference = make_reference(self.solver, schedule,
                                           substeps=self.n_substeps)
            if len(reference) < self.n_steps:
                raise ConfigurationError(
                    f"reference holds {len(reference)} frames, episode needs {self.n_steps}")
            self.reference = reference

        self._state = None
        self._finished = True
        self._t = 0.0
        self._step_count = 0
        self._actions = []
        self._noise_rng = None

    # -- lifecycle ----------------------------------------------------------

    @property
    def is_1d(self):
        return self.config.problem != "navier-stokes"

    @property
    def time(self):
        return self._t

    def reset(self, seed, initial=None):
        """Start a fresh episode; returns the initial observation."""
        root = np.random.SeedSequence(int(seed))
        ic_seq, noise_seq = root.spawn(2)
        noise = self.config.sensing.noise
        if noise.seed is not None:
            noise_seq = np.random.SeedSequence(noise.seed)
        self._noise_rng = np.random.default_rng(noise_seq)

        initial = initial if initial is not None else self.config.initial
        if self.is_1d:
            if initial.kind == "random-constant":
                c = float(np.random.default_rng(ic_seq).uniform(initial.lo, initial.hi))
                u = np.full(self.grid.nx, c)
            elif initial.kind == "constant":
                u = np.full(self.grid.nx, float(initial.value))
            else:
                u = np.asarray(initial.profile, dtype=float).copy()
                if u.shape != (self.grid.nx,):
                    raise ConfigurationError(
                        f"initial profile has shape {u.shape}, grid wants ({self.grid.nx},)")
            if self.config.problem == "reaction-diffusion":
                u[0] = 0.0  # the pinned end is part of the state space
            self._state = u
        else:
            self._state = self.solver.zero_state()

        self._finished = False
        self._t = 0.0
        self._step_count = 0
        self._actions = []
        return self.observe()

    def step(self, action):
        if self._finished or self._state is None:
            raise EpisodeStateError("episode is finished; call reset() first")
        action = float(action)
        if not np.isfinite(action):
            raise ValueError("action must be finite")
        ep = self.config.episode
        applied = float(min(max(action, ep.action_lo), ep.action_hi))
        self._actions.append(applied)

        if self.is_1d:
            prev = self._state
            u = prev
            for _ in range(self.n_substeps):
                u = self.solver.step(u, applied)
            self._state = u
            reward = reward_step(prev, u, self.grid, self.config.reward_1d.norm)
            guard_norm = l2_norm_1d(u, self.grid.dx, "rectangle")
            finite = bool(np.all(np.isfinite(u)))
        else:
            state = self._state
            for _ in range(self.n_substeps):
                state = self.solver.step(state, applied)
            self._state = state
            k = self._step_count
            reward = reward_ns(state.u, state.v,
                               self.reference.u[k], self.reference.v[k],
                               applied, self.config.reward_ns, self.grid)
            guard_norm = l2_norm_2d(state.u, state.v, self.grid.dx, self.grid.dy,
                                    "rectangle")
            finite = bool(np.all(np.isfinite(state.u)) and np.all(np.isfinite(state.v)))

        self._step_count += 1
        self._t = self._step_count * ep.dt_control

        terminated = self._step_count >= self.n_steps
        truncated = (not finite) or (finite and guard_norm > ep.blowup_threshold)
        if terminated:
            truncated = False  # horizon wins on a tie
        if terminated and self.is_1d:
            reward += reward_terminal(self._state, self._actions,
                                      self.config.reward_1d, self.grid)
        if not finite:
            reward = float(np.nan_to_num(reward, nan=0.0, posinf=0.0, neginf=0.0))
        self._finished = terminated or truncated

        info = {
            "l2_norm": self.state_norm(),
            "applied_action": applied,
            "t": self._t,
            "state": self._raw_state(),
        }
        return StepOutcome(observation=self.observe(), reward=float(reward),
                           terminated=terminated, truncated=truncated, info=info)

    # -- observation --------------------------------------------------------

    def observe(self):
        """Observation per the sensing spec, plus optional Gaussian noise."""
        mode = self.config.sensing.mode
        if self.is_1d:
            u = self._state
            dx = self.grid.dx
            if mode == "full-state":
                obs = u.copy()
            elif mode == "collocated":
                if self.config.actuation.kind == "dirichlet":
                    obs = np.array([(u[-1] - u[-2]) / dx])  # sense the slope
                else:
                    obs = np.array([u[-1]])  # sense the value
            elif mode == "anti-collocated-value":
                obs = np.array([u[0]])
            else:
                obs = np.array([(u[1] - u[0]) / dx])
        else:
            obs = np.concatenate([self._state.u.ravel(), self._state.v.ravel()])
        noise = self.config.sensing.noise
        if noise.kind == "gaussian":
            obs = obs + self._noise_rng.normal(0.0, noise.sigma, size=obs.shape)
        return obs

    def observation_size(self):
        if self.is_1d:
            return self.grid.nx if self.config.sensing.mode == "full-state" else 1
        return 2 * self.grid.nx * self.grid.ny

    # -- helpers -------------------------------------------------------------

    def state_norm(self):
        """State norm in the configured metric convention."""
        kind = self.config.metric_norm
        if self.is_1d:
            return l2_norm_1d(self._state, self.grid.dx, kind)
        return l2_norm_2d(self._state.u, self._state.v,
                          self.grid.dx, self.grid.dy, kind)

    def _raw_state(self):
        if self.is_1d:
            return self._state.copy()
        return {"u": self._state.u.copy(), "v": self._state.v.copy(),
                "p": self._state.p.copy()}
