"""Backstepping feedback synthesis for the two 1D problems.

Transport case: the scalar gain k on [0, 1] solves the Volterra equation

    k(x) = -beta(x) + int_0^x beta(x - y) k(y) dy

by successive approximations with trapezoid quadrature; on the uniform grid
beta(x_i - y_j) is beta[i - j] exactly, so no interpolation error enters. The
feedback is U = int_0^1 k(1 - y) u(y) dy with k(1 - y) read by index reversal.

Reaction-diffusion case: the gain k(x, y) on the triangle 0 <= y <= x <= 1
solves the Goursat problem

    k_xx - k_yy = lam(y) k,   k(x, 0) = 0,   k(x, x) = -(1/2) int_0^x lam

via the change of variables xi = x + y, eta = x - y, under which the problem
is equivalent to the double-integral equation

    G(xi, eta) = -(1/4) int_eta^xi lam(r/2) dr
                 + int_eta^xi int_0^eta (lam((r - s)/2) / 4) G(r, s) ds dr

iterated to a fixed point on the (xi, eta) lattice of spacing dx. Grid nodes
(x_i, y_j) map onto lattice points (i + j, i - j), so sampling back to the
triangle is exact index arithmetic. Both boundary identities hold by
construction: the double integral vanishes identically on eta = xi and
eta = 0, and the diagonal data is accumulated with per-interval Gauss
quadrature so k(x, x) matches -(1/2) int_0^x lam to near machine precision.
The feedback is U = int_0^1 k(1, y) u(y) dy (trapezoid).
"""

from dataclasses import dataclass

import numpy as np
from scipy.integrate import cumulative_trapezoid

from .errors import ConfigurationError, ConvergenceError


@dataclass(frozen=True)
class KernelHyperbolic:
    """Transport gain k(x) sampled on the grid, with fixed-point diagnostics."""

    values: np.ndarray
    residual: float
    iterations: int


@dataclass(frozen=True)
class KernelParabolic:
    """Triangular gain k(x_i, y_j) (zero above the diagonal) with diagnostics.

    ``pde_residual`` is the max-abs defect of the Goursat PDE under centered
    second differences at strictly interior triangle points; it is a
    discretization diagnostic, not a convergence measure.
    """

    values: np.ndarray
    residual: float
    iterations: int
    pde_residual: float


def _volterra_rhs(k, beta, dx):
    # trapezoid of beta(x - y) k(y) over [0, x] for every grid x, via convolution
    conv = np.convolve(k, beta)[: len(k)]
    return dx * (conv - 0.5 * (k[0] * beta + k * beta[0]))


def solve_kernel_hyperbolic(beta_values, grid, tol=1e-12, max_iters=200):
    """Fixed-point iteration k <- -beta + int beta(x-y) k(y) dy."""
    beta = np.asarray(beta_values, dtype=float)
    if beta.shape != (grid.nx,):
        raise ConfigurationError(
            f"beta profile has {beta.shape}, grid wants ({grid.nx},)")
    if tol <= 0:
        raise ConfigurationError("tol must be positive")
    k = -beta.copy()
    update = np.inf
    for it in range(1, max_iters + 1):
        k_next = -beta + _volterra_rhs(k, beta, grid.dx)
        update = float(np.max(np.abs(k_next - k)))
        k = k_next
        if update < tol:
            break
    else:
        raise ConvergenceError(
            f"hyperbolic kernel did not reach tol={tol} in {max_iters} iterations "
            f"(last update {update:.3e})", residual=update)
    residual = float(np.max(np.abs(k + beta - _volterra_rhs(k, beta, grid.dx))))
    return KernelHyperbolic(values=k, residual=residual, iterations=it)


def control_hyperbolic(kernel, state, grid):
    """Trapezoid quadrature of k(1 - y) u(y) over [0, 1]."""
    u = np.asarray(state, dtype=float)
    if u.shape != kernel.values.shape:
        raise ConfigurationError(
            f"state length {u.shape} does not match kernel {kernel.values.shape}")
    integrand = kernel.values[::-1] * u
    return float(np.trapezoid(integrand, dx=grid.dx))


def _gauss_cumulative(f, nodes, order=5):
    """Cumulative integral of f from nodes[0] to each node, per-interval Gauss."""
    gl_x, gl_w = np.polynomial.legendre.leggauss(order)
    a, b = nodes[:-1], nodes[1:]
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    pts = mid[:, None] + half[:, None] * gl_x[None, :]
    seg = half * np.sum(np.asarray(f(pts)) * gl_w[None, :], axis=1)
    return np.concatenate([[0.0], np.cumsum(seg)])


def solve_kernel_parabolic(lam, grid, tol=1e-10, max_iters=200):
    """Solve the Goursat kernel for a callable reaction coefficient ``lam``.

    ``lam`` must be evaluable on arbitrary points of [0, 1] (profiles from
    :mod:`pdectl.profiles` qualify); the lattice of the equivalent integral
    equation lives between grid nodes.
    """
    nx, dx = grid.nx, grid.dx
    if nx < 4:
        raise ConfigurationError("parabolic kernel needs at least 4 grid points")
    n2 = 2 * (nx - 1) + 1
    xi = np.arange(n2) * dx  # lattice for both xi and eta, spanning [0, 2]
    m_idx, n_idx = np.meshgrid(np.arange(n2), np.arange(n2), indexing="ij")
    tri = (n_idx <= m_idx) & (m_idx + n_idx <= n2 - 1)

    lam_cum = _gauss_cumulative(lambda r: lam(r / 2.0), xi)
    g0 = -0.25 * (lam_cum[:, None] - lam_cum[None, :])
    g0[~tri] = 0.0
    # (xi - eta)/2 is only sampled inside the triangle; clip the masked-out
    # arguments into the profile's domain before evaluation
    args = np.clip((m_idx - n_idx) * (dx / 2.0), 0.0, 1.0)
    coeff = 0.25 * np.asarray(lam(args))
    coeff[~tri] = 0.0

    g = g0.copy()
    update = np.inf
    for it in range(1, max_iters + 1):
        prod = coeff * g
        prod[~tri] = 0.0
        dbl = cumulative_trapezoid(prod, dx=dx, axis=0, initial=0.0)
        dbl = cumulative_trapezoid(dbl, dx=dx, axis=1, initial=0.0)
        g_next = g0 + (dbl - np.diag(dbl)[None, :])
        g_next[~tri] = 0.0
        update = float(np.max(np.abs(g_next - g)))
        g = g_next
        if update < tol:
            break
    else:
        raise ConvergenceError(
            f"parabolic kernel did not reach tol={tol} in {max_iters} iterations "
            f"(last update {update:.3e})", residual=update)

    i_idx, j_idx = np.meshgrid(np.arange(nx), np.arange(nx), indexing="ij")
    k = np.where(j_idx <= i_idx, g[i_idx + j_idx, i_idx - j_idx], 0.0)
    lam_nodes = np.asarray(lam(grid.x))
    return KernelParabolic(
        values=k,
        residual=update,
        iterations=it,
        pde_residual=goursat_residual(k, lam_nodes, grid),
    )


def goursat_residual(k, lam_nodes, grid):
    """Max-abs centered-difference defect of k_xx - k_yy - lam(y) k.

    Evaluated at triangle points whose full five-point stencil stays strictly
    inside the triangle (j <= i - 2).
    """
    dx2 = grid.dx * grid.dx
    res = 0.0
    for i in range(1, grid.nx - 1):
        j = np.arange(1, i - 1)
        if len(j) == 0:
            continue
        kxx = (k[i - 1, j] - 2.0 * k[i, j] + k[i + 1, j]) / dx2
        kyy = (k[i, j - 1] - 2.0 * k[i, j] + k[i, j + 1]) / dx2
        res = max(res, float(np.max(np.abs(kxx - kyy - lam_nodes[j] * k[i, j]))))
    return res


def control_parabolic(kernel, state, grid):
    """Trapezoid quadrature of the top kernel row k(1, y) against the state."""
    u = np.asarray(state, dtype=float)
    if u.shape != (kernel.values.shape[1],):
        raise ConfigurationError(
            f"state length {u.shape} does not match kernel row {kernel.values.shape}")
    return float(np.trapezoid(kernel.values[-1] * u, dx=grid.dx))


def dump_kernel_hyperbolic(kernel, grid, path):
    """Write (x, k(x)) rows as CSV."""
    with open(path, "w") as fh:
        fh.write("x,k\n")
        for x, k in zip(grid.x, kernel.values):
            fh.write(f"{float(x)!r},{float(k)!r}\n")


def dump_kernel_parabolic(kernel, grid, path):
    """Write (x, y, k(x, y)) rows over the triangle as CSV."""
    xs = grid.x
    with open(path, "w") as fh:
        fh.write("x,y,k\n")
        for i in range(grid.nx):
            for j in range(i + 1):
                fh.write(f"{float(xs[i])!r},{float(xs[j])!r},"
                         f"{float(kernel.values[i, j])!r}\n")
