"""Semantic exception hierarchy shared across the package."""


class NisimError(Exception):
    """Base error for this package."""


class InputError(NisimError, ValueError):
    """Inputs violate a contract: domain, shape, labels, or malformed data."""


class ParameterRangeError(InputError):
    """A numeric parameter is outside its documented range."""


class ResourceLimitError(NisimError):
    """A configured enumeration or work cap would be exceeded.

    The message names the cap so callers can raise it deliberately.
    """
