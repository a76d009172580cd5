"""Exception types shared across the package."""


class ConfigurationError(ValueError):
    """Raised when a configuration is invalid or an unsupported combination is requested."""


class EpisodeStateError(RuntimeError):
    """Raised when an episode is used in an invalid state (e.g. stepping after termination)."""


class ConvergenceError(RuntimeError):
    """Raised when an iterative solve fails to reach its tolerance.

    Carries the last residual in ``residual``.
    """

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class BlowupError(RuntimeError):
    """Raised when a rollout produces non-finite fields outside the episode guard."""

    def __init__(self, message, step_index=None):
        super().__init__(message)
        self.step_index = step_index


class ProtocolError(RuntimeError):
    """Raised when an external piped controller violates the line protocol."""
