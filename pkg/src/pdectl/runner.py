"""Episode execution: manifests, controllers, trajectory/metric files, suites.

A run manifest names an environment (preset, file or inline mapping), a
controller, a seed and an output directory. Running an episode writes

* ``trajectory.csv`` -- one row per control step (t, action, reward, then the
  state vector for 1D problems or the state norm for 2D), preceded by a t=0
  row holding the initial state;
* ``frames/frame_NNNNNN.csv`` -- for the 2D problem, one file per sampled
  control step with columns i, j, u, v, p;
* ``metrics.json`` -- episode totals.

Floats are serialized with repr (shortest round-trip), so identical runs
produce byte-identical trajectory files and metrics can be recomputed from
the files exactly.
"""

import json
import selectors
import shlex
import subprocess
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from . import config as config_mod
from .adjoint import optimize
from .backstepping import (control_hyperbolic, control_parabolic,
                           solve_kernel_hyperbolic, solve_kernel_parabolic)
from .env import BoundaryControlEnv, InitialCondition
from .errors import ConfigurationError, ProtocolError
from .norms import l2_norm_1d, l2_norm_2d
from .profiles import ChebyshevProfile

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_BLOWUP = 3
EXIT_PROTOCOL = 4


@dataclass(frozen=True)
class RunManifest:
    environment: object  # preset name, config path, or mapping
    controller: dict = field(default_factory=lambda: {"id": "zero"})
    seed: int = 0
    out_dir: Optional[str] = None
    initial: Optional[dict] = None  # overrides the config's initial condition
    frame_stride: int = 1  # 2D frame subsampling

    def to_mapping(self):
        env = self.environment
        if isinstance(env, config_mod.EnvConfig):
            env = config_mod.to_mapping(env)
        data = {
            "environment": env,
            "controller": dict(self.controller),
            "seed": int(self.seed),
            "out_dir": self.out_dir,
            "initial": dict(self.initial) if self.initial else None,
            "frame_stride": int(self.frame_stride),
        }
        return data

    @classmethod
    def from_mapping(cls, data):
        return cls(
            environment=data["environment"],
            controller=dict(data.get("controller", {"id": "zero"})),
            seed=int(data.get("seed", 0)),
            out_dir=data.get("out_dir"),
            initial=data.get("initial"),
            frame_stride=int(data.get("frame_stride", 1)),
        )

    @classmethod
    def from_file(cls, path):
        path = Path(path)
        if path.suffix == ".json":
            with open(path) as fh:
                return cls.from_mapping(json.load(fh))
        if path.suffix == ".toml":
            try:
                import tomllib
            except ModuleNotFoundError:
                import tomli as tomllib
            with open(path, "rb") as fh:
                return cls.from_mapping(tomllib.load(fh))
        raise ConfigurationError(f"manifest must be .json or .toml, got {path.name}")


@dataclass
class EpisodeMetrics:
    total_reward: float
    summed_l2: float
    final_l2: float
    terminated: bool
    truncated: bool
    steps: int
    wall_time: float

    def to_mapping(self):
        return {
            "total_reward": self.total_reward,
            "summed_l2": self.summed_l2,
            "final_l2": self.final_l2,
            "terminated": self.terminated,
            "truncated": self.truncated,
            "steps": self.steps,
            "wall_time": self.wall_time,
        }


# -- controllers --------------------------------------------------------------


class ZeroController:
    def __call__(self, t, obs):
        return 0.0

    def close(self):
        pass


class ConstantController:
    def __init__(self, value):
        self.value = float(value)

    def __call__(self, t, obs):
        return self.value

    def close(self):
        pass


class ScheduleController:
    """Plays a precomputed schedule indexed by control step."""

    def __init__(self, values, dt_control):
        self.values = np.asarray(values, dtype=float)
        self.dt = dt_control

    def __call__(self, t, obs):
        k = int(round(t / self.dt))
        k = min(k, len(self.values) - 1)
        return float(self.values[k])

    def close(self):
        pass


class BacksteppingController:
    """Full-state backstepping feedback; the kernel is solved once per
    (coefficient profile, grid) and reused across episodes."""

    def __init__(self, env):
        cfg = env.config
        if cfg.sensing.mode != "full-state" or cfg.sensing.noise.kind != "none":
            raise ConfigurationError(
                "backstepping control needs noise-free full-state sensing")
        if cfg.actuation.kind != "dirichlet":
            raise ConfigurationError("backstepping feedback is a Dirichlet law")
        self.grid = env.grid
        if cfg.problem == "transport":
            beta = ChebyshevProfile(cfg.gamma_cheb, cfg.amplitude).sample(env.grid)
            self.kernel = solve_kernel_hyperbolic(beta, env.grid)
            self._law = control_hyperbolic
        elif cfg.problem == "reaction-diffusion":
            lam = ChebyshevProfile(cfg.gamma_cheb, cfg.amplitude)
            self.kernel = solve_kernel_parabolic(lam, env.grid)
            self._law = control_parabolic
        else:
            raise ConfigurationError("backstepping applies to the 1D problems only")

    def __call__(self, t, obs):
        return self._law(self.kernel, obs, self.grid)

    def close(self):
        pass


class AdjointController:
    """Optimizes the lid schedule against the environment's reference, then
    replays it."""

    def __init__(self, env, iters=25, step_size=10.0, start="zero"):
        cfg = env.config
        if cfg.problem != "navier-stokes":
            raise ConfigurationError("the adjoint controller applies to navier-stokes")
        if env.n_substeps != 1:
            raise ConfigurationError(
                "the adjoint controller needs dt_pde == dt_control")
        n = env.n_steps
        if start == "zero":
            init = np.zeros(n)
        elif start == "reference":
            init = env.reference.schedule.copy()
        else:
            raise ConfigurationError(f"unknown start {start!r}")
        self.result = optimize(init, env.reference, env.solver,
                               gamma_ctrl=cfg.reward_ns.gamma_ctrl,
                               u_ref=cfg.reward_ns.a_ref,
                               step_size=step_size, iters=iters)
        self._schedule = ScheduleController(self.result.schedule,
                                            cfg.episode.dt_control)

    def __call__(self, t, obs):
        return self._schedule(t, obs)

    def close(self):
        pass


class PipeController:
    """Talks to a child process over newline-delimited JSON.

    Per step the observation is written to the child's stdin as
    ``{"t": <float>, "obs": [<floats>]}`` and one reply line
    ``{"action": <float>}`` is read back.
    """

    def __init__(self, cmd, timeout=30.0):
        self.timeout = float(timeout)
        try:
            self.proc = subprocess.Popen(
                shlex.split(cmd), stdin=subprocess.PIPE, stdout=subprocess.PIPE,
                text=True, bufsize=1)
        except OSError as exc:
            raise ProtocolError(f"cannot start pipe controller {cmd!r}: {exc}") from exc
        self._sel = selectors.DefaultSelector()
        self._sel.register(self.proc.stdout, selectors.EVENT_READ)

    def __call__(self, t, obs):
        msg = json.dumps({"t": float(t), "obs": [float(x) for x in obs]})
        try:
            self.proc.stdin.write(msg + "\n")
            self.proc.stdin.flush()
        except (BrokenPipeError, OSError) as exc:
            raise ProtocolError(f"pipe controller closed its stdin: {exc}") from exc
        if not self._sel.select(timeout=self.timeout):
            raise ProtocolError(f"pipe controller timed out after {self.timeout}s")
        line = self.proc.stdout.readline()
        if not line:
            raise ProtocolError("pipe controller closed its stdout")
        try:
            reply = json.loads(line)
            action = float(reply["action"])
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            raise ProtocolError(f"malformed pipe reply {line!r}") from exc
        return action

    def close(self):
        if self.proc.poll() is None:
            self.proc.stdin.close()
            try:
                self.proc.wait(timeout=5.0)
            except subprocess.TimeoutExpired:
                self.proc.kill()
                self.proc.wait()
        self._sel.close()


def build_controller(spec, env):
    """Controller factory keyed on the manifest's controller id."""
    spec = dict(spec)
    cid = spec.pop("id", "zero")
    if cid == "zero":
        return ZeroController()
    if cid == "constant":
        return ConstantController(spec.get("value", 0.0))
    if cid == "backstepping":
        return BacksteppingController(env)
    if cid == "schedule":
        if "values" in spec:
            values = spec["values"]
        elif "file" in spec:
            values = np.loadtxt(spec["file"], delimiter=",", skiprows=1, usecols=1)
        else:
            raise ConfigurationError("schedule controller needs 'values' or 'file'")
        return ScheduleController(values, env.config.episode.dt_control)
    if cid == "adjoint":
        return AdjointController(env, iters=int(spec.get("iters", 25)),
                                 step_size=float(spec.get("step_size", 10.0)),
                                 start=spec.get("start", "zero"))
    if cid == "pipe":
        if "cmd" not in spec:
            raise ConfigurationError("pipe controller needs 'cmd'")
        return PipeController(spec["cmd"], timeout=float(spec.get("timeout", 30.0)))
    raise ConfigurationError(f"unknown controller id {cid!r}")


# -- episode loop --------------------------------------------------------------


def _initial_from_mapping(data):
    if data is None:
        return None
    return InitialCondition(
        kind=data.get("kind", "constant"),
        value=float(data.get("value", 0.0)),
        lo=float(data.get("lo", 1.0)),
        hi=float(data.get("hi", 10.0)),
        profile=np.asarray(data["profile"], dtype=float) if "profile" in data else None,
    )


def _fmt(x):
    return repr(float(x))


def run_episode(manifest, env=None, controller=None):
    """Execute one episode; returns (EpisodeMetrics, out_dir or None).

    ``env`` and ``controller`` can be passed in to reuse instances (and their
    cached kernels / references) across episodes.
    """
    cfg = config_mod.resolve(manifest.environment)
    if env is None:
        env = BoundaryControlEnv(cfg)
    own_controller = controller is None
    if controller is None:
        controller = build_controller(manifest.controller, env)

    out_dir = Path(manifest.out_dir) if manifest.out_dir else None
    frames_dir = None
    traj_fh = None
    if out_dir is not None:
        out_dir.mkdir(parents=True, exist_ok=True)
        traj_fh = open(out_dir / "trajectory.csv", "w")
        if env.is_1d:
            cols = ",".join(f"u{i}" for i in range(env.grid.nx))
            traj_fh.write(f"t,action,reward,{cols}\n")
        else:
            traj_fh.write("t,action,reward,l2_norm\n")
            frames_dir = out_dir / "frames"
            frames_dir.mkdir(exist_ok=True)

    t0 = time.perf_counter()
    initial = _initial_from_mapping(manifest.initial)
    obs = env.reset(manifest.seed, initial=initial)

    summed_l2 = env.state_norm()
    final_l2 = summed_l2
    total_reward = 0.0
    steps = 0
    terminated = truncated = False

    if traj_fh is not None:
        if env.is_1d:
            state = ",".join(_fmt(x) for x in env._state)
            traj_fh.write(f"0.0,,,{state}\n")
        else:
            traj_fh.write(f"0.0,,,{_fmt(env.state_norm())}\n")
            _write_frame(frames_dir, 0, env)

    try:
        while not (terminated or truncated):
            action = controller(env.time, obs)
            outcome = env.step(action)
            obs = outcome.observation
            total_reward += outcome.reward
            summed_l2 += outcome.info["l2_norm"]
            final_l2 = outcome.info["l2_norm"]
            steps += 1
            terminated, truncated = outcome.terminated, outcome.truncated
            if traj_fh is not None:
                if env.is_1d:
                    state = ",".join(_fmt(x) for x in outcome.info["state"])
                    traj_fh.write(f"{_fmt(outcome.info['t'])},"
                                  f"{_fmt(outcome.info['applied_action'])},"
                                  f"{_fmt(outcome.reward)},{state}\n")
                else:
                    traj_fh.write(f"{_fmt(outcome.info['t'])},"
                                  f"{_fmt(outcome.info['applied_action'])},"
                                  f"{_fmt(outcome.reward)},"
                                  f"{_fmt(outcome.info['l2_norm'])}\n")
                    if steps % manifest.frame_stride == 0:
                        _write_frame(frames_dir, steps, env)
    finally:
        if traj_fh is not None:
            traj_fh.close()
        if own_controller:
            controller.close()

    metrics = EpisodeMetrics(
        total_reward=total_reward,
        summed_l2=summed_l2,
        final_l2=final_l2,
        terminated=terminated,
        truncated=truncated,
        steps=steps,
        wall_time=time.perf_counter() - t0,
    )
    if out_dir is not None:
        with open(out_dir / "metrics.json", "w") as fh:
            json.dump(metrics.to_mapping(), fh, indent=2, sort_keys=True)
            fh.write("\n")
    return metrics, out_dir


def _write_frame(frames_dir, step, env):
    state = env._raw_state()
    u, v, p = state["u"], state["v"], state["p"]
    nx, ny = u.shape
    with open(frames_dir / f"frame_{step:06d}.csv", "w") as fh:
        fh.write("i,j,u,v,p\n")
        for i in range(nx):
            for j in range(ny):
                fh.write(f"{i},{j},{_fmt(u[i, j])},{_fmt(v[i, j])},{_fmt(p[i, j])}\n")


# -- metric recomputation (reproducibility checks) ----------------------------


def recompute_1d_metrics(trajectory_path, cfg):
    """Recompute (total_reward, summed_l2, final_l2) from a 1D trajectory CSV."""
    rows = _read_csv(trajectory_path)
    dx = 1.0 / (cfg.nx - 1)
    summed = 0.0
    total_reward = 0.0
    final = 0.0
    for row in rows:
        state = np.array([float(x) for x in row[3:]])
        final = l2_norm_1d(state, dx, cfg.metric_norm)
        summed += final
        if row[2] != "":
            total_reward += float(row[2])
    return total_reward, summed, final


def recompute_2d_summed_l2(frames_dir, cfg):
    """Recompute the summed velocity norm from 2D frame files (stride 1)."""
    frames = sorted(Path(frames_dir).glob("frame_*.csv"))
    dx = 1.0 / (cfg.nx - 1)
    dy = 1.0 / (cfg.ny - 1)
    summed = 0.0
    final = 0.0
    for path in frames:
        rows = _read_csv(path)
        u = np.zeros((cfg.nx, cfg.ny))
        v = np.zeros((cfg.nx, cfg.ny))
        for row in rows:
            i, j = int(row[0]), int(row[1])
            u[i, j] = float(row[2])
            v[i, j] = float(row[3])
        final = l2_norm_2d(u, v, dx, dy, cfg.metric_norm)
        summed += final
    return summed, final


def _read_csv(path):
    with open(path) as fh:
        lines = fh.read().strip().split("\n")
    return [line.split(",") for line in lines[1:]]


# -- suites --------------------------------------------------------------------


def run_suite(manifest, episodes, seed_base=0):
    """Run ``episodes`` episodes with seeds base .. base+N-1 and aggregate.

    The environment and controller are built once and reused; per-episode
    outputs go to ``<out_dir>/episode_NNN`` when an output directory is set.
    """
    if episodes < 1:
        raise ConfigurationError("episodes must be >= 1")
    cfg = config_mod.resolve(manifest.environment)
    env = BoundaryControlEnv(cfg)
    controller = build_controller(manifest.controller, env)
    out_root = Path(manifest.out_dir) if manifest.out_dir else None

    per_episode = []
    try:
        for i in range(episodes):
            sub = RunManifest(
                environment=cfg,
                controller=manifest.controller,
                seed=manifest.seed + i if episodes > 1 else manifest.seed,
                out_dir=str(out_root / f"episode_{i:03d}") if out_root else None,
                initial=manifest.initial,
                frame_stride=manifest.frame_stride,
            )
            metrics, _ = run_episode(sub, env=env, controller=controller)
            per_episode.append(metrics)
    finally:
        controller.close()

    rewards = np.array([m.total_reward for m in per_episode])
    sums = np.array([m.summed_l2 for m in per_episode])
    report = {
        "episodes": episodes,
        "seed_base": manifest.seed,
        "reward_mean": float(np.mean(rewards)),
        "reward_std": float(np.std(rewards)),
        "summed_l2_mean": float(np.mean(sums)),
        "summed_l2_std": float(np.std(sums)),
        "truncated_count": int(sum(m.truncated for m in per_episode)),
        "per_episode": [m.to_mapping() for m in per_episode],
    }
    if out_root is not None:
        out_root.mkdir(parents=True, exist_ok=True)
        with open(out_root / "suite.json", "w") as fh:
            json.dump(report, fh, indent=2, sort_keys=True)
            fh.write("\n")
    return report


def format_suite_table(report):
    lines = [
        f"episodes: {report['episodes']} (seeds {report['seed_base']}.."
        f"{report['seed_base'] + report['episodes'] - 1})",
        f"reward     mean {report['reward_mean']:12.4f}   std {report['reward_std']:10.4f}",
        f"summed L2  mean {report['summed_l2_mean']:12.4f}   std {report['summed_l2_std']:10.4f}",
        f"truncated  {report['truncated_count']}",
    ]
    return "\n".join(lines)
