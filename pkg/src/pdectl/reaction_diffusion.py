"""Explicit integrator for the 1D reaction-diffusion equation.

    u_t = u_xx + lam(x) * u,   u(0, t) = 0

with Dirichlet or Neumann actuation at x = 1. Interior points use the
centered second difference plus the (pre-update, fully explicit) reaction
term:

    u_j <- u_j + dt * ((u_{j-1} - 2 u_j + u_{j+1}) / dx^2 + lam_j * u_j)

Update order per step: interior, then pin u_0 = 0, then write the actuated
point so that the Neumann one-sided formula references the already-updated
u_{nx-2}.
"""

import numpy as np

from .errors import ConfigurationError
from .transport import DIRICHLET, NEUMANN


class ReactionDiffusionSolver:
    """Steps the reaction-diffusion PDE; the x = 0 end is pinned to zero.

    The explicit diffusive stability bound dt <= dx^2 / 2 is enforced at
    construction.
    """

    def __init__(self, grid, lambda_values, dt, kind=DIRICHLET):
        lambda_values = np.asarray(lambda_values, dtype=float)
        if lambda_values.shape != (grid.nx,):
            raise ConfigurationError(
                f"lambda profile has {lambda_values.shape}, grid wants ({grid.nx},)")
        limit = 0.5 * grid.dx * grid.dx
        if dt > limit * (1.0 + 1e-12):
            raise ConfigurationError(
                f"diffusive stability violation: dt={dt} exceeds dx^2/2={limit}")
        if kind not in (DIRICHLET, NEUMANN):
            raise ConfigurationError(f"unsupported boundary kind {kind!r}")
        self.grid = grid
        self.lam = lambda_values
        self.dt = dt
        self.kind = kind

    def step(self, u, control):
        """Advance one dt; returns a new array."""
        dt, dx = self.dt, self.grid.dx
        out = np.empty_like(u)
        out[1:-1] = u[1:-1] + dt * (
            (u[:-2] - 2.0 * u[1:-1] + u[2:]) / (dx * dx) + self.lam[1:-1] * u[1:-1])
        out[0] = 0.0
        if self.kind == DIRICHLET:
            out[-1] = control
        else:
            out[-1] = out[-2] + dx * control
        return out
