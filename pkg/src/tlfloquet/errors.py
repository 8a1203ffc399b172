"""Exception hierarchy shared across the package."""


class TLError(Exception):
    """Base class for all package errors."""


class ContextError(TLError):
    """Operands live on different chains, or the chain itself is unsuitable."""


class DomainError(TLError, ValueError):
    """An index, order or parameter is outside its admissible range."""


class ModeError(TLError):
    """Operation requested in the wrong boundary mode."""


class NotBilinearError(TLError):
    """Element has no representation as a fermion bilinear c^dag M c."""


class BoundaryError(DomainError):
    """A momentum sits exactly on the |tau sin p| = 1 interval boundary."""


class ResourceError(TLError):
    """Requested computation exceeds the exact-arithmetic size bound."""


class ExactOverflowError(ResourceError, OverflowError):
    """Integer entries would overflow int64 in a sparse product."""
