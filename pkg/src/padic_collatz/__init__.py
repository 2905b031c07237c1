"""Generalized Collatz maps g_{p,q} on p-adic integers, their conjugating
isometry phi_{p,q}, periodic points, cycle search and height statistics."""

from .padic import DomainError, HenselDigits, PadicApprox, Params

__version__ = "0.1.0"

__all__ = ["DomainError", "HenselDigits", "PadicApprox", "Params", "__version__"]
