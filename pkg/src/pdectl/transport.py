"""Explicit upwind integrator for the 1D transport equation with recirculation.

    u_t = u_x + beta(x) * u(0, t),   x in [0, 1)

Information travels from x = 1 toward x = 0, so the boundary input lives at
x = 1 (Dirichlet value or Neumann slope). The interior points advance with a
first-order one-sided difference in the transport direction; the recirculation
source reads the outlet value u(0) from the pre-update state, keeping the
scheme fully explicit:

    u_j <- u_j + dt * ((u_{j+1} - u_j) / dx + beta_j * u_0),  j = 0 .. nx-2

The last point is then set from the control: directly for Dirichlet, or via
the rearranged one-sided difference u_{nx-1} = u_{nx-2} + dx * U for Neumann.
"""

import numpy as np

from .errors import ConfigurationError

DIRICHLET = "dirichlet"
NEUMANN = "neumann"


class TransportSolver:
    """Steps the transport PDE with boundary actuation at x = 1.

    dt must satisfy the CFL bound dt <= dx; this is checked once at
    construction rather than per step.
    """

    def __init__(self, grid, beta_values, dt, kind=DIRICHLET):
        beta_values = np.asarray(beta_values, dtype=float)
        if beta_values.shape != (grid.nx,):
            raise ConfigurationError(
                f"beta profile has {beta_values.shape}, grid wants ({grid.nx},)")
        if dt > grid.dx * (1.0 + 1e-12):
            raise ConfigurationError(
                f"CFL violation: dt={dt} exceeds dx={grid.dx}")
        if kind not in (DIRICHLET, NEUMANN):
            raise ConfigurationError(f"unsupported boundary kind {kind!r}")
        self.grid = grid
        self.beta = beta_values
        self.dt = dt
        self.kind = kind

    def step(self, u, control):
        """Advance one dt; returns a new array."""
        dt, dx = self.dt, self.grid.dx
        out = np.empty_like(u)
        out[:-1] = u[:-1] + dt * ((u[1:] - u[:-1]) / dx + self.beta[:-1] * u[0])
        if self.kind == DIRICHLET:
            out[-1] = control
        else:
            out[-1] = out[-2] + dx * control
        return out
