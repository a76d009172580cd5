"""Environment configuration: schema, file ingestion, validation, presets.

Configs are plain mappings (JSON or TOML documents) with these keys::

    problem   "transport" | "reaction-diffusion" | "navier-stokes"
    grid      {"nx": int[, "ny": int]}
    episode   {"horizon", "dt_control", "dt_pde",
               "action_lo", "action_hi", "blowup_threshold"}
    actuation {"edge": "x0"|"x1"|"top"|"bottom"|"left"|"right",
               "kind": "dirichlet"|"neumann"}
    sensing   {"mode": "full-state"|"collocated"|"anti-collocated-value"|
                        "anti-collocated-gradient",
               "noise": {"kind": "none"|"gaussian", "sigma": float,
                         "seed": int|null}}
    coefficient {"gamma_cheb": float, "amplitude": float}     # 1D only
    reward    {"sigma","eta","zeta","norm"}                   # 1D
              {"gamma_ctrl","a_ref"}                          # navier-stokes
    fluid     {"nu","rho"}                                    # navier-stokes
    poisson   {"max_iters","tol","omega"}                     # navier-stokes
    reference {"start": float, "slope": float}                # navier-stokes
    metric_norm "rectangle" | "euclidean"
    initial   {"kind": "random-constant"|"constant", "value", "lo", "hi"}

Seeds are 64-bit unsigned integers. The supported sensing/actuation
combinations per problem are validated up front; unsupported pairs raise a
ConfigurationError naming the offending cell.

The benchmark presets pin the published experiment settings. Two calibration
choices are preset-specific rather than defaults: the transport benchmark
uses a blow-up threshold of 30 (its open-loop trajectories only reach a
rectangle-rule norm of ~49 per unit of initial amplitude within the 5 s
horizon, so the generic 1e4 guard would never fire, while stabilized runs
stay below ~13); and the reaction-diffusion benchmark reports episode metrics
in the euclidean (unweighted) norm, which is the convention behind its
published per-episode summed-norm table.
"""

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Tuple

from .errors import ConfigurationError
from .env import (ActuationSpec, EpisodeConfig, InitialCondition, NoiseSpec,
                  PROBLEMS, RewardSpec1D, RewardSpecNS, SensingSpec)
from .ns2d import EDGES, FluidParams, PoissonSettings

try:
    import tomllib  # py311+
except ModuleNotFoundError:  # pragma: no cover - depends on interpreter
    import tomli as tomllib


@dataclass(frozen=True)
class EnvConfig:
    problem: str
    nx: int
    ny: Optional[int] = None
    episode: EpisodeConfig = None
    actuation: ActuationSpec = field(default_factory=ActuationSpec)
    sensing: SensingSpec = field(default_factory=SensingSpec)
    gamma_cheb: Optional[float] = None
    amplitude: Optional[float] = None
    reward_1d: Optional[RewardSpec1D] = None
    reward_ns: Optional[RewardSpecNS] = None
    fluid: Optional[FluidParams] = None
    poisson: Optional[PoissonSettings] = None
    reference_schedule: Tuple[float, float] = (3.0, -5.0)
    metric_norm: str = "rectangle"
    initial: InitialCondition = field(default_factory=InitialCondition)

    def __post_init__(self):
        if self.problem not in PROBLEMS:
            raise ConfigurationError(
                f"unknown problem {self.problem!r}; expected one of {PROBLEMS}")
        if self.episode is None:
            raise ConfigurationError("episode settings are required")
        if self.metric_norm not in ("rectangle", "euclidean"):
            raise ConfigurationError(f"unknown metric_norm {self.metric_norm!r}")


_1D_EDGES = ("x0", "x1")

# sensing modes admitted per problem (actuation is x1 for both 1D problems;
# the value measurement at x=0 is pointless for reaction-diffusion where that
# end is pinned to zero)
_1D_SENSING = {
    "transport": ("full-state", "collocated", "anti-collocated-value",
                  "anti-collocated-gradient"),
    "reaction-diffusion": ("full-state", "collocated", "anti-collocated-gradient"),
}


def validate_combination(config):
    """Check the (problem, actuation, sensing) cell is a supported one."""
    prob, act, sens = config.problem, config.actuation, config.sensing
    if prob == "navier-stokes":
        if act.edge not in EDGES:
            raise ConfigurationError(
                f"navier-stokes actuates one of {EDGES}, got edge {act.edge!r}")
        if act.kind != "dirichlet":
            raise ConfigurationError(
                "navier-stokes supports Dirichlet actuation only, "
                f"got {act.kind!r}")
        if sens.mode != "full-state":
            raise ConfigurationError(
                "navier-stokes supports full-state sensing only, "
                f"got {sens.mode!r}")
        if config.ny is None:
            raise ConfigurationError("navier-stokes needs grid.ny")
        return
    if act.edge not in _1D_EDGES:
        raise ConfigurationError(
            f"{prob} actuates at x0 or x1, got edge {act.edge!r}")
    if act.edge == "x0":
        raise ConfigurationError(
            f"{prob} actuation at x0 is not supported (only the x1 rows of the "
            "supported-combination table are exercised)")
    if act.kind not in ("dirichlet", "neumann"):
        raise ConfigurationError(f"unknown actuation kind {act.kind!r}")
    if sens.mode not in _1D_SENSING[prob]:
        raise ConfigurationError(
            f"{prob} with {act.kind} actuation at {act.edge} does not support "
            f"sensing mode {sens.mode!r}")


# -- mapping <-> dataclass ---------------------------------------------------


def from_mapping(data):
    """Build an EnvConfig from a plain mapping (see module docstring)."""
    try:
        problem = data["problem"]
        grid = data["grid"]
        ep = data["episode"]
    except KeyError as exc:
        raise ConfigurationError(f"config is missing required key {exc}") from exc
    episode = EpisodeConfig(
        horizon=float(ep["horizon"]),
        dt_control=float(ep["dt_control"]),
        dt_pde=float(ep["dt_pde"]),
        action_lo=float(ep.get("action_lo", -20.0)),
        action_hi=float(ep.get("action_hi", 20.0)),
        blowup_threshold=float(ep.get("blowup_threshold", 1e4)),
    )
    act = data.get("actuation", {})
    actuation = ActuationSpec(edge=act.get("edge", "x1" if problem != "navier-stokes" else "top"),
                              kind=act.get("kind", "dirichlet"))
    sens = data.get("sensing", {})
    noise = sens.get("noise", {})
    sensing = SensingSpec(
        mode=sens.get("mode", "full-state"),
        noise=NoiseSpec(kind=noise.get("kind", "none"),
                        sigma=float(noise.get("sigma", 0.0)),
                        seed=noise.get("seed")),
    )
    init = data.get("initial", {})
    initial = InitialCondition(
        kind=init.get("kind", "random-constant" if problem != "navier-stokes" else "constant"),
        value=float(init.get("value", 0.0)),
        lo=float(init.get("lo", 1.0)),
        hi=float(init.get("hi", 10.0)),
    )
    kwargs = dict(
        problem=problem,
        nx=int(grid["nx"]),
        ny=int(grid["ny"]) if "ny" in grid else None,
        episode=episode,
        actuation=actuation,
        sensing=sensing,
        metric_norm=data.get("metric_norm", "rectangle"),
        initial=initial,
    )
    if problem in ("transport", "reaction-diffusion"):
        coeff = data.get("coefficient")
        if coeff is None:
            raise ConfigurationError(f"{problem} config needs a coefficient section")
        kwargs["gamma_cheb"] = float(coeff["gamma_cheb"])
        kwargs["amplitude"] = float(coeff["amplitude"])
        rw = data.get("reward", {})
        kwargs["reward_1d"] = RewardSpec1D(
            sigma=float(rw.get("sigma", 300.0)),
            eta=float(rw.get("eta", 1000.0)),
            zeta=float(rw.get("zeta", 20.0)),
            norm=rw.get("norm", "rectangle"),
        )
    elif problem == "navier-stokes":
        fl = data.get("fluid", {})
        kwargs["fluid"] = FluidParams(nu=float(fl.get("nu", 0.1)),
                                      rho=float(fl.get("rho", 1.0)))
        po = data.get("poisson", {})
        kwargs["poisson"] = PoissonSettings(
            max_iters=int(po.get("max_iters", 5000)),
            tol=float(po.get("tol", 1e-7)),
            omega=float(po.get("omega", 0.8)),
        )
        rw = data.get("reward", {})
        kwargs["reward_ns"] = RewardSpecNS(gamma_ctrl=float(rw.get("gamma_ctrl", 0.1)),
                                           a_ref=float(rw.get("a_ref", 2.0)))
        ref = data.get("reference", {})
        kwargs["reference_schedule"] = (float(ref.get("start", 3.0)),
                                        float(ref.get("slope", -5.0)))
    cfg = EnvConfig(**kwargs)
    validate_combination(cfg)
    return cfg


def to_mapping(config):
    """Canonical mapping for an EnvConfig; from_mapping round-trips it."""
    ep = config.episode
    data = {
        "problem": config.problem,
        "grid": {"nx": config.nx},
        "episode": {
            "horizon": ep.horizon,
            "dt_control": ep.dt_control,
            "dt_pde": ep.dt_pde,
            "action_lo": ep.action_lo,
            "action_hi": ep.action_hi,
            "blowup_threshold": ep.blowup_threshold,
        },
        "actuation": {"edge": config.actuation.edge, "kind": config.actuation.kind},
        "sensing": {
            "mode": config.sensing.mode,
            "noise": {
                "kind": config.sensing.noise.kind,
                "sigma": config.sensing.noise.sigma,
                "seed": config.sensing.noise.seed,
            },
        },
        "metric_norm": config.metric_norm,
        "initial": {
            "kind": config.initial.kind,
            "value": config.initial.value,
            "lo": config.initial.lo,
            "hi": config.initial.hi,
        },
    }
    if config.ny is not None:
        data["grid"]["ny"] = config.ny
    if config.problem in ("transport", "reaction-diffusion"):
        data["coefficient"] = {"gamma_cheb": config.gamma_cheb,
                               "amplitude": config.amplitude}
        rw = config.reward_1d
        data["reward"] = {"sigma": rw.sigma, "eta": rw.eta, "zeta": rw.zeta,
                          "norm": rw.norm}
    else:
        data["fluid"] = {"nu": config.fluid.nu, "rho": config.fluid.rho}
        data["poisson"] = {"max_iters": config.poisson.max_iters,
                           "tol": config.poisson.tol,
                           "omega": config.poisson.omega}
        data["reward"] = {"gamma_ctrl": config.reward_ns.gamma_ctrl,
                          "a_ref": config.reward_ns.a_ref}
        data["reference"] = {"start": config.reference_schedule[0],
                             "slope": config.reference_schedule[1]}
    return data


def from_file(path):
    """Load a config mapping from a .json or .toml document."""
    path = Path(path)
    if path.suffix == ".json":
        with open(path) as fh:
            data = json.load(fh)
    elif path.suffix == ".toml":
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    else:
        raise ConfigurationError(f"config file must be .json or .toml, got {path.name}")
    return from_mapping(data)


# -- benchmark presets --------------------------------------------------------


def transport_benchmark(**overrides):
    """Transport benchmark: gamma 7.35, amplitude 5, 100 Hz control over 5 s."""
    data = {
        "problem": "transport",
        "grid": {"nx": 101},
        "episode": {"horizon": 5.0, "dt_control": 0.01, "dt_pde": 1e-4,
                    "action_lo": -20.0, "action_hi": 20.0,
                    "blowup_threshold": 30.0},
        "coefficient": {"gamma_cheb": 7.35, "amplitude": 5.0},
        "reward": {"sigma": 300.0, "eta": 1000.0, "zeta": 20.0, "norm": "rectangle"},
        "metric_norm": "rectangle",
    }
    data.update(overrides)
    return from_mapping(data)


def reaction_diffusion_benchmark(**overrides):
    """Reaction-diffusion benchmark: gamma 8, amplitude 50, 1 kHz control over 1 s."""
    data = {
        "problem": "reaction-diffusion",
        "grid": {"nx": 201},
        "episode": {"horizon": 1.0, "dt_control": 1e-3, "dt_pde": 1e-5,
                    "action_lo": -20.0, "action_hi": 20.0,
                    "blowup_threshold": 1e4},
        "coefficient": {"gamma_cheb": 8.0, "amplitude": 50.0},
        "reward": {"sigma": 300.0, "eta": 1000.0, "zeta": 20.0, "norm": "rectangle"},
        "metric_norm": "euclidean",
    }
    data.update(overrides)
    return from_mapping(data)


def navier_stokes_benchmark(**overrides):
    """Cavity tracking benchmark: 21 x 21, lid program 3 - 5t over 0.2 s."""
    data = {
        "problem": "navier-stokes",
        "grid": {"nx": 21, "ny": 21},
        "episode": {"horizon": 0.2, "dt_control": 1e-3, "dt_pde": 1e-3,
                    "action_lo": -10.0, "action_hi": 10.0,
                    "blowup_threshold": 1e4},
        "actuation": {"edge": "top", "kind": "dirichlet"},
        "fluid": {"nu": 0.1, "rho": 1.0},
        "poisson": {"max_iters": 5000, "tol": 1e-7, "omega": 0.8},
        "reward": {"gamma_ctrl": 0.1, "a_ref": 2.0},
        "reference": {"start": 3.0, "slope": -5.0},
        "metric_norm": "rectangle",
    }
    data.update(overrides)
    return from_mapping(data)


PRESETS = {
    "transport-benchmark": transport_benchmark,
    "reaction-diffusion-benchmark": reaction_diffusion_benchmark,
    "navier-stokes-benchmark": navier_stokes_benchmark,
}


def resolve(spec):
    """Accept a preset name, a config file path, or a mapping."""
    if isinstance(spec, EnvConfig):
        return spec
    if isinstance(spec, dict):
        return from_mapping(spec)
    if isinstance(spec, (str, Path)):
        name = str(spec)
        if name in PRESETS:
            return PRESETS[name]()
        if Path(name).exists():
            return from_file(name)
        raise ConfigurationError(
            f"{name!r} is neither a preset ({sorted(PRESETS)}) nor a config file")
    raise ConfigurationError(f"cannot build a config from {type(spec)!r}")
