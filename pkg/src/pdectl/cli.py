"""Command-line front end.

Subcommands::

    pdectl run       --config <preset|file> --controller <id> [--seed N]
                     [--out DIR] [--pipe CMD] [--initial-constant C]
    pdectl suite     --config <preset|file> --controller <id> --episodes N
                     [--seed BASE] [--out DIR]
    pdectl reference --config <preset|file> --out DIR
    pdectl kernel    --config <preset|file> --out DIR

Exit codes: 0 success, 2 configuration error, 3 solver blow-up without
terminal success, 4 pipe-protocol error.
"""

import argparse
import json
import sys
from pathlib import Path

from . import config as config_mod
from .backstepping import (dump_kernel_hyperbolic, dump_kernel_parabolic,
                           solve_kernel_hyperbolic, solve_kernel_parabolic)
from .env import BoundaryControlEnv
from .errors import ConfigurationError, ProtocolError
from .grids import Grid1D, Grid2D
from .ns2d import default_lid_schedule, make_reference, NavierStokes2D
from .profiles import ChebyshevProfile
from .runner import (EXIT_BLOWUP, EXIT_CONFIG, EXIT_OK, EXIT_PROTOCOL,
                     RunManifest, format_suite_table, run_episode, run_suite)


def _controller_spec(args):
    spec = {"id": args.controller}
    if args.controller == "constant":
        spec["value"] = args.value
    if args.controller == "pipe":
        if not args.pipe:
            raise ConfigurationError("--pipe CMD is required for the pipe controller")
        spec["cmd"] = args.pipe
        spec["timeout"] = args.pipe_timeout
    if args.controller == "adjoint":
        spec["iters"] = args.adjoint_iters
    return spec


def _manifest(args):
    initial = None
    if args.initial_constant is not None:
        initial = {"kind": "constant", "value": args.initial_constant}
    return RunManifest(
        environment=args.config,
        controller=_controller_spec(args),
        seed=args.seed,
        out_dir=args.out,
        initial=initial,
        frame_stride=args.frame_stride,
    )


def cmd_run(args):
    manifest = _manifest(args)
    metrics, out_dir = run_episode(manifest)
    print(json.dumps(metrics.to_mapping(), indent=2, sort_keys=True))
    if out_dir:
        print(f"outputs in {out_dir}", file=sys.stderr)
    return EXIT_BLOWUP if metrics.truncated else EXIT_OK


def cmd_suite(args):
    manifest = _manifest(args)
    report = run_suite(manifest, episodes=args.episodes, seed_base=args.seed)
    print(format_suite_table(report))
    return EXIT_OK


def cmd_reference(args):
    cfg = config_mod.resolve(args.config)
    if cfg.problem != "navier-stokes":
        raise ConfigurationError("reference generation applies to navier-stokes")
    ep = cfg.episode
    solver = NavierStokes2D(Grid2D(cfg.nx, cfg.ny), cfg.fluid, cfg.poisson,
                            dt=ep.dt_pde, edge=cfg.actuation.edge)
    schedule = default_lid_schedule(ep.horizon, ep.dt_control, *cfg.reference_schedule)
    ref = make_reference(solver, schedule, substeps=ep.n_substeps)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "schedule.csv", "w") as fh:
        fh.write("t,U\n")
        for k, val in enumerate(ref.schedule):
            fh.write(f"{float(k * ref.dt_control)!r},{float(val)!r}\n")
    for k in range(len(ref)):
        with open(out / f"ref_{k:06d}.csv", "w") as fh:
            fh.write("i,j,u,v\n")
            for i in range(cfg.nx):
                for j in range(cfg.ny):
                    fh.write(f"{i},{j},{float(ref.u[k, i, j])!r},"
                             f"{float(ref.v[k, i, j])!r}\n")
    print(f"wrote {len(ref)} reference frames to {out}")
    return EXIT_OK


def cmd_kernel(args):
    cfg = config_mod.resolve(args.config)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    grid = Grid1D(cfg.nx)
    profile = ChebyshevProfile(cfg.gamma_cheb, cfg.amplitude)
    if cfg.problem == "transport":
        kernel = solve_kernel_hyperbolic(profile.sample(grid), grid)
        path = out / "kernel.csv"
        dump_kernel_hyperbolic(kernel, grid, path)
    elif cfg.problem == "reaction-diffusion":
        kernel = solve_kernel_parabolic(profile, grid)
        path = out / "kernel.csv"
        dump_kernel_parabolic(kernel, grid, path)
    else:
        raise ConfigurationError("kernel dumps apply to the 1D problems")
    print(f"wrote {path} (fixed-point residual {kernel.residual:.3e}, "
          f"{kernel.iterations} iterations)")
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="pdectl",
        description="PDE boundary-control episodes, suites and model-based baselines")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--config", required=True,
                       help="preset name (%s) or a JSON/TOML config file"
                            % ", ".join(sorted(config_mod.PRESETS)))
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", default=None, help="output directory")

    p_run = sub.add_parser("run", help="run one episode")
    add_common(p_run)
    p_run.add_argument("--controller", default="zero",
                       choices=["zero", "constant", "backstepping", "adjoint", "pipe"])
    p_run.add_argument("--value", type=float, default=0.0,
                       help="constant controller value")
    p_run.add_argument("--pipe", default=None, help="external controller command")
    p_run.add_argument("--pipe-timeout", type=float, default=30.0)
    p_run.add_argument("--adjoint-iters", type=int, default=25)
    p_run.add_argument("--initial-constant", type=float, default=None,
                       help="override the initial condition with a constant")
    p_run.add_argument("--frame-stride", type=int, default=1)
    p_run.set_defaults(func=cmd_run)

    p_suite = sub.add_parser("suite", help="run an episode suite and aggregate")
    add_common(p_suite)
    p_suite.add_argument("--controller", default="zero",
                         choices=["zero", "constant", "backstepping", "adjoint", "pipe"])
    p_suite.add_argument("--value", type=float, default=0.0)
    p_suite.add_argument("--pipe", default=None)
    p_suite.add_argument("--pipe-timeout", type=float, default=30.0)
    p_suite.add_argument("--adjoint-iters", type=int, default=25)
    p_suite.add_argument("--initial-constant", type=float, default=None)
    p_suite.add_argument("--frame-stride", type=int, default=1)
    p_suite.add_argument("--episodes", type=int, required=True)
    p_suite.set_defaults(func=cmd_suite)

    p_ref = sub.add_parser("reference", help="build and dump the tracking reference")
    add_common(p_ref)
    p_ref.set_defaults(func=cmd_reference)

    p_kernel = sub.add_parser("kernel", help="solve and dump a backstepping kernel")
    add_common(p_kernel)
    p_kernel.set_defaults(func=cmd_kernel)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ProtocolError as exc:
        print(f"pipe protocol error: {exc}", file=sys.stderr)
        return EXIT_PROTOCOL


if __name__ == "__main__":
    sys.exit(main())
