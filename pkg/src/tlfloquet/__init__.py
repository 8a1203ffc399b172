"""Periodic Temperley-Lieb algebra at beta = 0, its Floquet charges and the
symplectic-fermion spectrum of the two-step Floquet Hamiltonian."""

from .errors import (
    BoundaryError,
    ContextError,
    DomainError,
    ExactOverflowError,
    ModeError,
    NotBilinearError,
    ResourceError,
    TLError,
)
from .realization import OPEN, PERIODIC
from .scalar import ExactMatrix, Scalar

__version__ = "0.1.0"

__all__ = [
    "OPEN",
    "PERIODIC",
    "BoundaryError",
    "ContextError",
    "DomainError",
    "ExactMatrix",
    "ExactOverflowError",
    "ModeError",
    "NotBilinearError",
    "ResourceError",
    "Scalar",
    "TLError",
]
