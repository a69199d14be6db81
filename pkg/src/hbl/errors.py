"""Exception types shared across the package."""

from __future__ import annotations


class ValidationError(ValueError):
    """A system, grid or configuration violates a structural invariant."""


class NotSemisimpleError(ValueError):
    """A matrix expected to be diagonalizable is defective.

    Carries the offending eigenvalue in ``eigenvalue``.
    """

    def __init__(self, message: str, eigenvalue: complex | None = None):
        super().__init__(message)
        self.eigenvalue = eigenvalue


class NotHurwitzError(ValueError):
    """A matrix expected to have spectrum in the open left half-plane does not."""

    def __init__(self, message: str, abscissa: float | None = None):
        super().__init__(message)
        self.abscissa = abscissa


class NotTransformableError(ValueError):
    """The normal-form change of variables is not available (singular source block)."""


class RegimeBoundaryError(ValueError):
    """The slow/fast spectral clusters are too close for the low-frequency construction."""


class DissipationError(ValueError):
    """A dissipation hypothesis fails at the requested frequency.

    ``witness`` carries the offending eigenvalue.
    """

    def __init__(self, message: str, witness: complex | None = None):
        super().__init__(message)
        self.witness = witness


class BranchCrossingError(ValueError):
    """Eigenvalue branches collide along the continuation path."""

    def __init__(self, message: str, location: float | None = None):
        super().__init__(message)
        self.location = location


class InconclusiveError(ValueError):
    """A search cannot certify either answer at the configured scale."""


class CflError(ValueError):
    """Time step violates the CFL restriction of the transport step."""


class QuadratureError(ArithmeticError):
    """Frequency-space quadrature did not converge to the requested tolerance."""
