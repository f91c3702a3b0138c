"""Exception hierarchy shared across the engine.

Two broad classes matter for exit codes and HTTP mapping: configuration
problems (bad config text, broken invariants, unknown names) and runtime
evaluation problems (numerical degeneracies, bad inputs to an operation).
"""

from __future__ import annotations


class EngineError(Exception):
    """Base class for all scopegen errors."""


class ConfigurationError(EngineError):
    """Invalid pipeline definition or config file (CLI exit code 1)."""


class ParseError(ConfigurationError):
    """Config text is not valid JSON; carries line/column when known."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        if line is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)


class ValidationError(ConfigurationError):
    """Config parsed but violates a structural rule; names the node path."""

    def __init__(self, message: str, path: str = "$"):
        self.path = path
        self.message = message
        super().__init__(f"{path}: {message}")


class CycleError(ConfigurationError):
    """Dependent properties form a cycle."""


class UnknownReference(ConfigurationError):
    """A dependent expression names a property that does not exist."""


class EvaluationError(EngineError):
    """Runtime failure while producing a sample (CLI exit code 2)."""


class FeatureEvaluationError(EvaluationError):
    """A feature failed during evaluation; names the offending node."""

    def __init__(self, feature_instance_id: str, message: str):
        self.feature_instance_id = feature_instance_id
        super().__init__(f"feature '{feature_instance_id}': {message}")


class ShapeMismatch(EvaluationError):
    """Arrays fed to a merge have incompatible shapes."""


class EmptyInput(EvaluationError):
    """A feature that requires at least one input image received none."""


class DegenerateAxis(EvaluationError):
    """Ellipse semi-axis is zero or negative."""


class NonPositiveSize(EvaluationError):
    """A size-like quantity (radius, sigma, scale factor) must be positive."""


class InvalidNA(ConfigurationError):
    """Numerical aperture outside (0, n_medium)."""


class EmptyRange(EvaluationError):
    """Autofocus search range contains no candidate planes."""


class NegativeInput(EvaluationError):
    """Poisson noise requires a non-negative image."""


class SingularTransform(EvaluationError):
    """Affine augmentation matrix is not invertible."""


class SingularSystem(EvaluationError):
    """Radial-center least squares is singular (e.g. constant image)."""


class EmptyTrace(EvaluationError):
    """Trace averaging needs at least one observation."""


class DegenerateFit(EvaluationError):
    """Calibration fit is underdetermined (all integrals equal)."""


class MissingField(EvaluationError):
    """A requested record field is absent."""

    def __init__(self, field: str):
        self.field = field
        super().__init__(f"missing record field '{field}'")


class UnsupportedShape(EvaluationError):
    """Array shape/dtype not representable in the requested file format."""


class SamplingWarning(UserWarning):
    """Object-plane sampling coarser than lambda/(4 NA)."""


class OutOfRangeZWarning(UserWarning):
    """An axial position fell outside the label volume and was clamped."""


class FlatMetricWarning(UserWarning):
    """Autofocus metric was flat over the search range."""
