"""Exception types shared across the package."""


class InvalidInputError(ValueError):
    """Malformed arguments or files: wrong shapes, bad values, unknown names."""


class NumericalFailure(RuntimeError):
    """A numerical routine produced an unusable result (e.g. a claimed mode
    whose curvature matrix is not negative definite)."""
