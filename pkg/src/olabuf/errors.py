"""Exception types shared across the package."""


class ParameterError(ValueError):
    """An argument is outside its documented domain (bad bin size, odd
    moment budget, polynomial degree too high, ...)."""


class BoundsError(IndexError):
    """An index or range falls outside the underlying array."""


class ReadOnlyArrayError(TypeError):
    """Write attempted on an array backing that does not support it."""
