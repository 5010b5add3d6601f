"""Exception types raised by the library."""


class ZqError(ValueError):
    """Base class for all argument/contract errors."""


class InvalidModulusError(ZqError):
    pass


class NonInvertibleError(ZqError, ZeroDivisionError):
    pass


class InvalidLengthError(ZqError):
    """Transform length is not a supported power of two."""


class CongruenceError(ZqError):
    """Modulus is not 1 mod 2n, so no primitive 2n-th root exists."""


class RootNotPrimitiveError(ZqError):
    pass


class LengthMismatchError(ZqError):
    pass


class ModFactorError(ZqError):
    """Unsupported input/output mod factor."""


class BoundError(ZqError):
    """An element or parameter is outside its documented range."""
