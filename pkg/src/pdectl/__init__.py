"""Boundary control of PDE benchmarks: solvers, environments, baselines.

Three problems behind one episodic reset/step interface:

* 1D transport with recirculation (upwind scheme, backstepping baseline);
* 1D reaction-diffusion with a destabilizing reaction profile (explicit
  scheme, backstepping via a Goursat kernel);
* 2D incompressible Navier-Stokes lid tracking (projection scheme,
  adjoint-based schedule optimization).
"""

from .adjoint import (AdjointState, CostBreakdown, OptimizeResult,
                      control_gradient, evaluate_cost, optimize,
                      rollout_trajectory, solve_adjoint)
from .backstepping import (KernelHyperbolic, KernelParabolic,
                           control_hyperbolic, control_parabolic,
                           solve_kernel_hyperbolic, solve_kernel_parabolic)
from .config import (EnvConfig, PRESETS, from_file, from_mapping,
                     navier_stokes_benchmark, reaction_diffusion_benchmark,
                     to_mapping, transport_benchmark)
from .env import (ActuationSpec, BoundaryControlEnv, EpisodeConfig,
                  InitialCondition, NoiseSpec, RewardSpec1D, RewardSpecNS,
                  SensingSpec, StepOutcome, reward_ns, reward_step,
                  reward_terminal)
from .errors import (BlowupError, ConfigurationError, ConvergenceError,
                     EpisodeStateError, ProtocolError)
from .grids import Grid1D, Grid2D
from .norms import l2_norm_1d, l2_norm_2d
from .ns2d import (FluidParams, NavierStokes2D, NSState, PoissonSettings,
                   ReferenceTrajectory, apply_velocity_bc,
                   default_lid_schedule, make_reference)
from .profiles import ChebyshevProfile, ConstantProfile, chebyshev_coefficient
from .reaction_diffusion import ReactionDiffusionSolver
from .runner import (EpisodeMetrics, RunManifest, run_episode, run_suite)
from .transport import TransportSolver

__version__ = "0.1.0"
