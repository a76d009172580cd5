"""Adjoint-based boundary-control optimization for the 2D tracking task.

The cost of a lid schedule U_0..U_{N-1} against a stored reference is

    J = 1/2 sum_k ||u_{k+1} - ref_k||^2_L2  dt  +  gamma/2 sum_k (U_k - U_ref)^2 dt

subject to the projection-scheme dynamics. The gradient is computed by a
backward sweep that applies, step by step, the exact transpose of each stage
of the forward update (linearized advection-diffusion, boundary writes, and
the pressure projection). Transposing the actual discrete stages -- rather
than discretizing the formal adjoint PDE -- keeps the gradient consistent
with finite differences of the rolled-out cost to solver tolerance; the
formal adjoint equation is recovered in the interior, and the lid-gradient
boundary functional (the line integral of the wall-normal derivative of the
tangential adjoint component) appears here as the accumulated sensitivity of
the boundary writes. The stationarity condition of the control update is
g = 0 with

    g_k = gamma (U_k - U_ref) + (boundary sensitivity functional)_k.

The backward sweep starts from a zero terminal field, injects dt (u - u_ref)
as the running source, enforces homogeneous boundary values, and projects
with a scalar potential solve that mirrors the forward pressure solve on the
transposed operator.
"""

from dataclasses import dataclass

import numpy as np

from .errors import BlowupError, ConfigurationError


@dataclass(frozen=True)
class CostBreakdown:
    tracking: float
    control: float

    @property
    def total(self):
        return self.tracking + self.control


@dataclass(frozen=True)
class AdjointState:
    """Time-indexed adjoint velocity (levels 0..N, terminal level zero) and
    scalar projection potentials, plus the per-step boundary sensitivity that
    feeds the control gradient."""

    lam_u: np.ndarray  # (N+1, nx, ny)
    lam_v: np.ndarray
    mu: np.ndarray
    boundary_gradient: np.ndarray  # (N,)


@dataclass(frozen=True)
class OptimizeResult:
    schedule: np.ndarray
    history: list
    stalled: bool


def rollout_trajectory(solver, schedule):
    """States u_0..u_N (u_0 = rest) under the schedule; raises on blow-up."""
    schedule = np.asarray(schedule, dtype=float)
    n = len(schedule)
    nx, ny = solver.grid.nx, solver.grid.ny
    us = np.zeros((n + 1, nx, ny))
    vs = np.zeros((n + 1, nx, ny))
    state = solver.zero_state()
    for k, val in enumerate(schedule):
        state = solver.step(state, val)
        if not (np.all(np.isfinite(state.u)) and np.all(np.isfinite(state.v))):
            raise BlowupError(f"forward rollout blew up at step {k}", step_index=k)
        us[k + 1] = state.u
        vs[k + 1] = state.v
    return us, vs


def evaluate_cost(schedule, reference, solver, gamma_ctrl=0.1, u_ref=2.0):
    """Roll out the schedule and split the cost into tracking and control."""
    schedule = np.asarray(schedule, dtype=float)
    if len(schedule) != len(reference):
        raise ConfigurationError(
            f"schedule has {len(schedule)} steps, reference {len(reference)}")
    us, vs = rollout_trajectory(solver, schedule)
    return _cost_from_trajectory(us, vs, schedule, reference, solver, gamma_ctrl, u_ref)


def _cost_from_trajectory(us, vs, schedule, reference, solver, gamma_ctrl, u_ref):
    dxdy = solver.grid.dx * solver.grid.dy
    dt = solver.dt
    du = us[1:] - reference.u
    dv = vs[1:] - reference.v
    tracking = 0.5 * float(np.sum(du * du) + np.sum(dv * dv)) * dxdy * dt
    control = 0.5 * gamma_ctrl * float(np.sum((schedule - u_ref) ** 2)) * dt
    return CostBreakdown(tracking=tracking, control=control)


# -- exact transposes of the forward stages --------------------------------


class _Transposer:
    """Adjoint counterparts of the solver's discrete stages."""

    def __init__(self, solver):
        self.solver = solver
        self.grid = solver.grid
        self.dx, self.dy = solver.grid.dx, solver.grid.dy
        self.dt = solver.dt
        self.nu = solver.params.nu

    def div_t(self, d):
        """Transpose of the centered interior divergence."""
        dx, dy = self.dx, self.dy
        u = np.zeros_like(d)
        v = np.zeros_like(d)
        core = d[1:-1, 1:-1]
        u[2:, 1:-1] += core / (2.0 * dx)
        u[:-2, 1:-1] -= core / (2.0 * dx)
        v[1:-1, 2:] += core / (2.0 * dy)
        v[1:-1, :-2] -= core / (2.0 * dy)
        return u, v

    def _mirror_t(self, p):
        q = p.copy()
        q[1, :] += p[0, :]
        q[-2, :] += p[-1, :]
        q[0, :] = 0.0
        q[-1, :] = 0.0
        q[:, 1] += q[:, 0]
        q[:, -2] += q[:, -1]
        q[:, 0] = 0.0
        q[:, -1] = 0.0
        return q

    def pressure_gradient_t(self, gx, gy):
        """Transpose of pressure_gradient (mirror then interior centered grad)."""
        dx, dy = self.dx, self.dy
        p = np.zeros_like(gx)
        cgx = gx[1:-1, 1:-1]
        cgy = gy[1:-1, 1:-1]
        p[2:, 1:-1] += cgx / (2.0 * dx)
        p[:-2, 1:-1] -= cgx / (2.0 * dx)
        p[1:-1, 2:] += cgy / (2.0 * dy)
        p[1:-1, :-2] -= cgy / (2.0 * dy)
        return self._mirror_t(p)

    def composite_laplacian_t(self, p):
        u, v = self.div_t(p)
        return self.pressure_gradient_t(u, v)

    def solve_transposed(self, rhs):
        """Damped Jacobi on the transposed composite operator."""
        cfg = self.solver.poisson
        p = np.zeros_like(rhs)
        for _ in range(cfg.max_iters):
            r = rhs - self.composite_laplacian_t(p)
            upd = cfg.omega * r[1:-1, 1:-1] / self.solver._diag[1:-1, 1:-1]
            p[1:-1, 1:-1] += upd
            if np.max(np.abs(upd)) < cfg.tol:
                break
        return p

    def project_t(self, yu, yv):
        """Transpose of the pressure projection (corrector + solve + rhs)."""
        s = self.pressure_gradient_t(yu, yv)
        q = self.solve_transposed(s)
        du, dv = self.div_t(q)
        return yu - du, yv - dv, q

    def lap_t(self, y):
        dx2, dy2 = self.dx ** 2, self.dy ** 2
        out = np.zeros_like(y)
        core = y[1:-1, 1:-1]
        out[1:-1, 1:-1] += core * (-2.0 / dx2 - 2.0 / dy2)
        out[2:, 1:-1] += core / dx2
        out[:-2, 1:-1] += core / dx2
        out[1:-1, 2:] += core / dy2
        out[1:-1, :-2] += core / dy2
        return out

    def _dx_t(self, w):
        out = np.zeros_like(w)
        core = w[1:-1, 1:-1]
        out[2:, 1:-1] += core / (2.0 * self.dx)
        out[:-2, 1:-1] -= core / (2.0 * self.dx)
        return out

    def _dy_t(self, w):
        out = np.zeros_like(w)
        core = w[1:-1, 1:-1]
        out[1:-1, 2:] += core / (2.0 * self.dy)
        out[1:-1, :-2] -= core / (2.0 * self.dy)
        return out

    def predictor_t(self, yu, yv, u, v):
        """Transpose of the predictor linearized at the stored state (u, v)."""
        dt, nu = self.dt, self.nu
        dx, dy = self.dx, self.dy
        zu = yu + dt * nu * self.lap_t(yu)
        zv = yv + dt * nu * self.lap_t(yv)
        ux = (u[2:, 1:-1] - u[:-2, 1:-1]) / (2.0 * dx)
        uy = (u[1:-1, 2:] - u[1:-1, :-2]) / (2.0 * dy)
        vx = (v[2:, 1:-1] - v[:-2, 1:-1]) / (2.0 * dx)
        vy = (v[1:-1, 2:] - v[1:-1, :-2]) / (2.0 * dy)
        w = np.zeros_like(u)
        w[1:-1, 1:-1] = u[1:-1, 1:-1] * yu[1:-1, 1:-1]
        zu -= dt * self._dx_t(w)
        w[1:-1, 1:-1] = v[1:-1, 1:-1] * yu[1:-1, 1:-1]
        zu -= dt * self._dy_t(w)
        w[1:-1, 1:-1] = u[1:-1, 1:-1] * yv[1:-1, 1:-1]
        zv -= dt * self._dx_t(w)
        w[1:-1, 1:-1] = v[1:-1, 1:-1] * yv[1:-1, 1:-1]
        zv -= dt * self._dy_t(w)
        zu[1:-1, 1:-1] -= dt * (ux * yu[1:-1, 1:-1] + vx * yv[1:-1, 1:-1])
        zv[1:-1, 1:-1] -= dt * (uy * yu[1:-1, 1:-1] + vy * yv[1:-1, 1:-1])
        return zu, zv


def _edge_values(arr_u, arr_v, edge):
    """Tangential-component slice on the controlled edge."""
    if edge == "top":
        return arr_u[:, -1]
    if edge == "bottom":
        return arr_u[:, 0]
    if edge == "left":
        return arr_v[0, :]
    return arr_v[-1, :]


def _zero_boundaries(*arrays):
    for a in arrays:
        a[0, :] = 0.0
        a[-1, :] = 0.0
        a[:, 0] = 0.0
        a[:, -1] = 0.0


def solve_adjoint(trajectory, reference, solver):
    """Backward sweep along a stored forward trajectory.

    ``trajectory`` is the (us, vs) pair from :func:`rollout_trajectory`
    (levels 0..N). Returns the adjoint fields (terminal level zero,
    homogeneous boundaries) together with the boundary sensitivity series.
    """
    us, vs = trajectory
    n = len(reference)
    if us.shape[0] != n + 1:
        raise ConfigurationError(
            f"trajectory has {us.shape[0]} levels, reference wants {n + 1}")
    tr = _Transposer(solver)
    dxdy = solver.grid.dx * solver.grid.dy
    dt = solver.dt
    nx, ny = solver.grid.nx, solver.grid.ny

    lam_u = np.zeros((n + 1, nx, ny))
    lam_v = np.zeros((n + 1, nx, ny))
    mu = np.zeros((n + 1, nx, ny))
    g_adj = np.zeros(n)

    wu = np.zeros((nx, ny))
    wv = np.zeros((nx, ny))
    for k in range(n - 1, -1, -1):
        # tracking source attached to the step-k endpoint u_{k+1}
        wu += dxdy * dt * (us[k + 1] - reference.u[k])
        wv += dxdy * dt * (vs[k + 1] - reference.v[k])
        # boundary write of the final BC stage (lid row of u_{k+1} is U_k)
        g_adj[k] += float(np.sum(_edge_values(wu, wv, solver.edge)))
        _zero_boundaries(wu, wv)
        wu, wv, q = tr.project_t(wu, wv)
        # boundary write of the intermediate BC stage (lid row of u*)
        g_adj[k] += float(np.sum(_edge_values(wu, wv, solver.edge)))
        _zero_boundaries(wu, wv)
        wu, wv = tr.predictor_t(wu, wv, us[k], vs[k])
        lam_u[k] = wu / dxdy
        lam_v[k] = wv / dxdy
        mu[k] = q / dxdy
        _zero_boundaries(lam_u[k], lam_v[k], mu[k])
    return AdjointState(lam_u=lam_u, lam_v=lam_v, mu=mu,
                        boundary_gradient=g_adj / dt)


def control_gradient(adjoint, schedule, gamma_ctrl=0.1, u_ref=2.0):
    """Per-step cost gradient g_k = gamma (U_k - U_ref) + boundary term.

    Expressed per unit control interval: finite differences of the rolled-out
    cost equal g * dt_control.
    """
    schedule = np.asarray(schedule, dtype=float)
    if schedule.shape != adjoint.boundary_gradient.shape:
        raise ConfigurationError("schedule and adjoint length mismatch")
    return gamma_ctrl * (schedule - u_ref) + adjoint.boundary_gradient


def optimize(initial_schedule, reference, solver, gamma_ctrl=0.1, u_ref=2.0,
             step_size=10.0, iters=30, max_halvings=20):
    """Gradient descent with a backtracking line search (halve until the cost
    decreases). The returned history of CostBreakdown totals is non-increasing;
    if a line search exhausts its halvings the search stops early with
    ``stalled=True`` and the best schedule so far."""
    if iters < 1:
        raise ConfigurationError("iters must be >= 1")
    sched = np.asarray(initial_schedule, dtype=float).copy()
    traj = rollout_trajectory(solver, sched)
    history = [_cost_from_trajectory(*traj, sched, reference, solver, gamma_ctrl, u_ref)]
    stalled = False
    for _ in range(iters):
        adj = solve_adjoint(traj, reference, solver)
        g = control_gradient(adj, sched, gamma_ctrl, u_ref)
        step = step_size
        accepted = None
        for _ in range(max_halvings + 1):
            trial = sched - step * g
            trial_traj = rollout_trajectory(solver, trial)
            cost = _cost_from_trajectory(*trial_traj, trial, reference, solver,
                                         gamma_ctrl, u_ref)
            if cost.total < history[-1].total:
                accepted = (trial, trial_traj, cost)
                break
            step *= 0.5
        if accepted is None:
            stalled = True
            break
        sched, traj, cost = accepted
        history.append(cost)
    return OptimizeResult(schedule=sched, history=history, stalled=stalled)
