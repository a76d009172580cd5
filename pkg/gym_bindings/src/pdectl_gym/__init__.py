"""RL-environment bindings for the pdectl boundary-control solvers.

``make("transport")`` (or "reaction-diffusion", "navier-stokes") returns an
environment speaking the standard reset/step interface with the benchmark
action bounds; pass a config mapping to override any schema section.
"""

from ._compat import HAVE_GYMNASIUM, register
from .conformance import ConformanceError, check_env
from .envs import ENV_PRESETS, PdeBoundaryControlEnv, make
from .parity import ParityReport, parity_check

__version__ = "0.1.0"

_REGISTRY_IDS = {
    "PdeCtl/Transport-v0": "pdectl_gym:make_transport",
    "PdeCtl/ReactionDiffusion-v0": "pdectl_gym:make_reactiondiffusion",
    "PdeCtl/NavierStokes-v0": "pdectl_gym:make_navierstokes",
}


def register_all():
    """Register the three environments with the host registry (gymnasium when
    available)."""
    for env_id, entry_point in _REGISTRY_IDS.items():
        register(env_id, entry_point)


def make_transport(**kwargs):
    return make("transport", kwargs.pop("config", None))


def make_reactiondiffusion(**kwargs):
    return make("reaction-diffusion", kwargs.pop("config", None))


def make_navierstokes(**kwargs):
    return make("navier-stokes", kwargs.pop("config", None))
