"""Exception types shared across the package."""


class InvalidParameterError(ValueError):
    """A physical or numerical parameter is outside its legal range."""


class SingularityError(RuntimeError):
    """A field was evaluated on a singular set (node, origin, z-axis)."""

    def __init__(self, message, point=None, t=None):
        super().__init__(message)
        self.point = point
        self.t = t


class NodeProximityError(SingularityError):
    """Probability density fell below the configured node guard."""


class ConfigurationError(ValueError):
    """A scenario document failed validation; ``path`` names the field."""

    def __init__(self, message, path=""):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path


class EnvelopeError(ConfigurationError):
    """The target density exceeded the rejection-sampling envelope."""
