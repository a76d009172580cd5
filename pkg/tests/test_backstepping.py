import numpy as np
import pytest
from scipy.integrate import quad
from scipy.special import i1

from pdectl import (ConfigurationError, ConvergenceError, Grid1D,
                    control_hyperbolic, control_parabolic,
                    solve_kernel_hyperbolic, solve_kernel_parabolic)
from pdectl.profiles import ChebyshevProfile, ConstantProfile


# -- transport (Volterra) kernel ---------------------------------------------


def test_zero_coefficient_gives_zero_kernel():
    grid = Grid1D(101)
    kernel = solve_kernel_hyperbolic(np.zeros(101), grid)
    np.testing.assert_array_equal(kernel.values, np.zeros(101))


def test_kernel_origin_value():
    grid = Grid1D(101)
    beta = 5 * np.cos(7.35 * np.arccos(grid.x))
    kernel = solve_kernel_hyperbolic(beta, grid)
    assert kernel.values[0] == pytest.approx(-beta[0], abs=1e-14)
    assert kernel.residual < 1e-11


@pytest.mark.parametrize("b", [0.5, 1.0, 2.0])
def test_constant_coefficient_analytic_solution(b):
    # for constant beta the Volterra equation reduces to k' = b k, k(0) = -b
    grid = Grid1D(501)
    kernel = solve_kernel_hyperbolic(np.full(501, b), grid)
    exact = -b * np.exp(b * grid.x)
    assert np.max(np.abs(kernel.values - exact)) < 5e-5  # O(dx^2) quadrature error


def test_fixed_point_residual_invariant():
    grid = Grid1D(201)
    beta = 5 * np.cos(7.35 * np.arccos(grid.x))
    kernel = solve_kernel_hyperbolic(beta, grid, tol=1e-12)
    # residual is recorded against the discrete fixed-point map itself
    assert kernel.residual < 1e-12


def test_iteration_cap_raises():
    grid = Grid1D(101)
    beta = 5 * np.cos(7.35 * np.arccos(grid.x))
    with pytest.raises(ConvergenceError):
        solve_kernel_hyperbolic(beta, grid, tol=1e-15, max_iters=2)


def test_feedback_constant_kernel_constant_state():
    grid = Grid1D(101)
    kernel = solve_kernel_hyperbolic(np.zeros(101), grid)
    object.__setattr__(kernel, "values", -np.ones(101))
    assert control_hyperbolic(kernel, np.ones(101), grid) == pytest.approx(-1.0, abs=1e-14)


def test_feedback_linear_in_state():
    grid = Grid1D(101)
    beta = 5 * np.cos(7.35 * np.arccos(grid.x))
    kernel = solve_kernel_hyperbolic(beta, grid)
    rng = np.random.default_rng(1)
    u = rng.standard_normal(101)
    assert control_hyperbolic(kernel, 3.0 * u, grid) == pytest.approx(
        3.0 * control_hyperbolic(kernel, u, grid), rel=1e-12)
    assert control_hyperbolic(kernel, np.zeros(101), grid) == 0.0


# -- reaction-diffusion (Goursat) kernel --------------------------------------


def bessel_closed_form(c, grid):
    x = grid.x
    X, Y = np.meshgrid(x, x, indexing="ij")
    z = np.sqrt(np.maximum(c * (X ** 2 - Y ** 2), 0.0))
    with np.errstate(invalid="ignore", divide="ignore"):
        k = np.where(z > 1e-12, -c * Y * i1(z) / np.where(z > 1e-12, z, 1.0),
                     -0.5 * c * Y)
    return np.where(Y <= X, k, 0.0)


def goursat_defect(k, lam_nodes, grid):
    dx2 = grid.dx ** 2
    worst = 0.0
    for i in range(1, grid.nx - 1):
        j = np.arange(1, i - 1)
        if len(j) == 0:
            continue
        kxx = (k[i - 1, j] - 2 * k[i, j] + k[i + 1, j]) / dx2
        kyy = (k[i, j - 1] - 2 * k[i, j] + k[i, j + 1]) / dx2
        worst = max(worst, float(np.max(np.abs(kxx - kyy - lam_nodes[j] * k[i, j]))))
    return worst


def test_zero_coefficient_gives_zero_triangle():
    grid = Grid1D(41)
    kernel = solve_kernel_parabolic(ConstantProfile(0.0), grid)
    np.testing.assert_array_equal(kernel.values, np.zeros((41, 41)))


def test_constant_coefficient_bessel_closed_form():
    c = 10.0
    grid = Grid1D(201)
    # the closed form must itself satisfy the kernel PDE and boundary rows
    # before it may serve as the oracle
    closed = bessel_closed_form(c, grid)
    lam_nodes = np.full(grid.nx, c)
    assert goursat_defect(closed, lam_nodes, grid) < 0.05  # O(dx^2) * |k'''' scale|
    np.testing.assert_allclose(np.diag(closed), -0.5 * c * grid.x, atol=1e-10)
    np.testing.assert_array_equal(closed[:, 0], np.zeros(grid.nx))

    kernel = solve_kernel_parabolic(ConstantProfile(c), grid)
    assert np.max(np.abs(kernel.values - closed)) < 1e-3


def test_boundary_identities_chebyshev():
    grid = Grid1D(201)
    lam = ChebyshevProfile(gamma_cheb=8.0, amplitude=50.0)
    kernel = solve_kernel_parabolic(lam, grid)
    k = kernel.values
    # k(x, 0) = 0 exactly by construction
    np.testing.assert_array_equal(k[:, 0], np.zeros(grid.nx))
    # k(x, x) = -(1/2) int_0^x lam, checked against adaptive quadrature
    for idx in (10, 50, 100, 150, 200):
        x = grid.x[idx]
        want, err = quad(lam, 0.0, x, limit=200)
        assert abs(k[idx, idx] + 0.5 * want) < 1e-6


def test_diagonal_corner_value_chebyshev():
    # int_0^1 T8 = -1/63, so k(1,1) = -(1/2) * 50 * (-1/63) = 25/63
    grid = Grid1D(201)
    kernel = solve_kernel_parabolic(ChebyshevProfile(8.0, 50.0), grid)
    assert kernel.values[-1, -1] == pytest.approx(25.0 / 63.0, abs=1e-4)


def test_interior_residual_second_order():
    lam = ChebyshevProfile(gamma_cheb=2.0, amplitude=5.0)
    defects = []
    for nx in (51, 101, 201):
        grid = Grid1D(nx)
        kernel = solve_kernel_parabolic(lam, grid)
        defects.append(kernel.pde_residual)
    assert defects[1] / defects[0] < 0.35
    assert defects[2] / defects[1] < 0.35


def test_parabolic_feedback_trivial_cases():
    grid = Grid1D(101)
    kernel = solve_kernel_parabolic(ConstantProfile(0.0), grid)
    rng = np.random.default_rng(2)
    u = rng.standard_normal(101)
    assert control_parabolic(kernel, u, grid) == 0.0
    kernel2 = solve_kernel_parabolic(ChebyshevProfile(8.0, 50.0), grid)
    base = control_parabolic(kernel2, u, grid)
    assert control_parabolic(kernel2, 2 * u, grid) == pytest.approx(2 * base, rel=1e-12)


def test_feedback_grid_mismatch():
    grid = Grid1D(101)
    kernel = solve_kernel_hyperbolic(np.zeros(101), grid)
    with pytest.raises(ConfigurationError):
        control_hyperbolic(kernel, np.zeros(51), grid)
