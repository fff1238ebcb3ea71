"""Exception types shared across the package."""


class PadeLabError(Exception):
    """Base class for all library errors."""


class RootfindingError(PadeLabError):
    """Rootfinding failed or did not reach the requested residual tolerance."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class PoleProximityError(PadeLabError):
    """Evaluation requested at or too close to a pole."""


class IllConditionedBuildError(PadeLabError):
    """An approximant build whose interpolation residual exceeds tolerance."""

    def __init__(self, message, condition_estimate=None, residual=None):
        super().__init__(message)
        self.condition_estimate = condition_estimate
        self.residual = residual


class NormalizationError(PadeLabError):
    """Denominator normalization is singular (zero at the origin outside the region)."""


class ConfigError(PadeLabError):
    """Experiment configuration violates the schema.

    ``path`` locates the offending field, e.g. ``table.radius``.
    """

    def __init__(self, message, path=""):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path


class StageError(PadeLabError):
    """A numerical pipeline stage failed."""

    def __init__(self, stage, message):
        super().__init__(f"stage '{stage}': {message}")
        self.stage = stage
