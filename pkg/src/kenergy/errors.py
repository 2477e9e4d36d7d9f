"""Exception hierarchy shared by all modules."""


class KEnergyError(Exception):
    """Base class for domain errors (CLI maps these to exit code 1)."""


class ShapeMismatchError(KEnergyError):
    """Operands act on variable matrices of incompatible shapes."""


class ZeroPolynomialError(KEnergyError):
    """Operation undefined on the zero polynomial."""


class FormatRangeError(KEnergyError):
    """Requested hyperdiscriminant format lies outside [delta, n]."""


class DegreeMismatchError(KEnergyError):
    """A stored polynomial's degree disagrees with the degree formula."""


class InvalidInstanceError(KEnergyError):
    """A variety instance (built-in or user supplied) fails validation."""
