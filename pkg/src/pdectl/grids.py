"""Uniform grids on the unit interval and unit square."""

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError


@dataclass(frozen=True)
class Grid1D:
    """Uniform grid of ``nx`` points on [0, 1]; point j sits at x = j * dx."""

    nx: int
    dx: float = field(init=False)

    def __post_init__(self):
        if self.nx < 3:
            raise ConfigurationError(f"Grid1D needs nx >= 3, got {self.nx}")
        object.__setattr__(self, "dx", 1.0 / (self.nx - 1))

    @property
    def x(self):
        return np.linspace(0.0, 1.0, self.nx)


@dataclass(frozen=True)
class Grid2D:
    """Uniform grid on [0, 1] x [0, 1]; arrays are indexed [i, j] with x = i * dx, y = j * dy."""

    nx: int
    ny: int
    dx: float = field(init=False)
    dy: float = field(init=False)

    def __post_init__(self):
        if self.nx < 3 or self.ny < 3:
            raise ConfigurationError(f"Grid2D needs nx, ny >= 3, got {self.nx}x{self.ny}")
        object.__setattr__(self, "dx", 1.0 / (self.nx - 1))
        object.__setattr__(self, "dy", 1.0 / (self.ny - 1))

    @property
    def x(self):
        return np.linspace(0.0, 1.0, self.nx)

    @property
    def y(self):
        return np.linspace(0.0, 1.0, self.ny)

    def meshes(self):
        return np.meshgrid(self.x, self.y, indexing="ij")
