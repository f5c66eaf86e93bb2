"""Exception hierarchy shared across the package."""

from __future__ import annotations


class QWalkError(Exception):
    """Base class for every error raised by qwalk."""


class ValidationError(QWalkError):
    """A coin, profile or state violates a structural constraint."""


class BadDimension(ValidationError):
    pass


class NonUnitary(ValidationError):
    pass


class ForbiddenDiagonal(ValidationError):
    pass


class DimensionMismatch(ValidationError):
    pass


class InteriorSingular(QWalkError):
    """The self-loop components cannot be eliminated at this phase."""


class AZero(QWalkError):
    """A(lambda) vanishes at some site, so no transfer matrix exists there."""

    def __init__(self, message: str, x: int | None = None):
        super().__init__(message)
        self.x = x


class AssumptionViolated(QWalkError):
    """The det/trace gates required by the eigenvalue criterion fail."""

    def __init__(self, message: str, item: int | None = None):
        super().__init__(message)
        self.item = item


class NumericallyMarginal(QWalkError):
    """The kernel-intersection decision falls inside the tolerance band."""

    def __init__(self, message: str, sigma: float):
        super().__init__(message)
        self.sigma = sigma


class ZeroVector(QWalkError):
    pass


class DegenerateTheta(ValidationError):
    pass


class OutOfDomain(QWalkError):
    pass
