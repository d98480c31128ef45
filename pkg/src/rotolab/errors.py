"""Exception types raised by the laboratory."""


class RotolabError(Exception):
    """Base class for all errors raised by rotolab."""


class OrbitEscape(RotolabError):
    """An orbit left the configured computational band."""


class OrbitOverflow(RotolabError):
    """A coordinate exceeded the overflow threshold while iterating."""


class EnclosureEscape(RotolabError):
    """A set-oriented image enclosure left the band."""


class BudgetExceeded(RotolabError):
    """The box-count cap was hit; ``partial`` holds the last complete result."""

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class ConstructionError(RotolabError):
    """Invalid parameters for a map family, or a failed construction check."""


class PreconditionError(RotolabError):
    """An operation was called outside its domain of validity."""


class InconsistentBracket(RotolabError):
    """Entropy lower bound exceeds the upper bound."""


class ConfigError(RotolabError):
    """A run configuration failed schema validation."""
