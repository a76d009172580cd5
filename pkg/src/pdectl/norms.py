"""Discrete L2 norms.

Two conventions coexist because published stabilization metrics are not
consistent about the grid weight:

* ``"rectangle"`` -- sqrt(sum(f_j^2) * dx), the grid-weighted rectangle rule.
  This is the canonical norm used by rewards, terminal bonuses and the
  blow-up guard.
* ``"euclidean"`` -- sqrt(sum(f_j^2)), the plain vector 2-norm (rectangle rule
  without the dx weight).

Episode metrics let the caller pick the convention per environment so the
reference per-episode numbers can be reproduced; see config presets.
"""

import numpy as np

from .errors import ConfigurationError

NORM_KINDS = ("rectangle", "euclidean")


def l2_norm_1d(values, dx, kind="rectangle"):
    values = np.asarray(values)
    s = float(np.sum(values * values))
    if kind == "rectangle":
        return float(np.sqrt(s * dx))
    if kind == "euclidean":
        return float(np.sqrt(s))
    raise ConfigurationError(f"unknown norm kind {kind!r}; expected one of {NORM_KINDS}")


def l2_norm_2d(u, v, dx, dy, kind="rectangle"):
    """Norm of a two-component field; both components enter the sum."""
    s = float(np.sum(u * u) + np.sum(v * v))
    if kind == "rectangle":
        return float(np.sqrt(s * dx * dy))
    if kind == "euclidean":
        return float(np.sqrt(s))
    raise ConfigurationError(f"unknown norm kind {kind!r}; expected one of {NORM_KINDS}")


def l2_sq_2d(u, v, dx, dy):
    """Squared rectangle-rule norm of a two-component field."""
    return float((np.sum(u * u) + np.sum(v * v)) * dx * dy)
