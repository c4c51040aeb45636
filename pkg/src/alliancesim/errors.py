"""Exception types shared across the package."""


class AllianceSimError(Exception):
    """Base class for all package-specific errors."""


class InvalidParamsError(AllianceSimError):
    """A model parameter violates its documented range or a cross-field rule."""


class MissingLinkError(AllianceSimError):
    """A link lookup referenced a (source, target) pair that does not exist."""


class InsufficientDataError(AllianceSimError):
    """Not enough usable data points for the requested computation."""


class ConfigError(AllianceSimError):
    """A configuration document failed schema or range validation.

    The message always names the offending key path.
    """
