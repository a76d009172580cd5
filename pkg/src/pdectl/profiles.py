"""Spatially varying coefficient profiles for the 1D problems.

The destabilizing recirculation/reaction coefficients are scaled Chebyshev
profiles a * cos(g * arccos(x)); for integer g this is a * T_g(x).
"""

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError


def chebyshev_coefficient(x, gamma_cheb, amplitude):
    """Evaluate amplitude * cos(gamma_cheb * arccos(x)) for x in [0, 1].

    Accepts scalars or arrays; rejects points outside the unit interval.
    The arccos argument is clamped to [-1, 1] to absorb roundoff at x = 1.
    """
    arr = np.asarray(x, dtype=float)
    if np.any(arr < 0.0) or np.any(arr > 1.0):
        raise ConfigurationError("chebyshev_coefficient requires 0 <= x <= 1")
    vals = amplitude * np.cos(gamma_cheb * np.arccos(np.clip(arr, -1.0, 1.0)))
    if np.isscalar(x) or arr.ndim == 0:
        return float(vals)
    return vals


@dataclass(frozen=True)
class ChebyshevProfile:
    """Callable coefficient profile a * cos(g * arccos(x)) on [0, 1]."""

    gamma_cheb: float
    amplitude: float

    def __call__(self, x):
        return chebyshev_coefficient(x, self.gamma_cheb, self.amplitude)

    def sample(self, grid):
        """Profile values on the grid nodes."""
        return np.asarray(self(grid.x), dtype=float)


@dataclass(frozen=True)
class ConstantProfile:
    """Constant coefficient, mostly for oracles and regression tests."""

    value: float

    def __call__(self, x):
        arr = np.asarray(x, dtype=float)
        out = np.full_like(arr, self.value)
        if np.isscalar(x) or arr.ndim == 0:
            return float(out)
        return out

    def sample(self, grid):
        return np.full(grid.nx, self.value)
