"""Exception types raised by the moment-problem pipeline.

Every error that a caller is expected to catch subclasses
:class:`Moment2dError`.  Input/serialization problems raise
:class:`SchemaError`; the remaining classes signal well-defined
mathematical or numerical gate failures and carry a human-readable
message with the offending quantity.
"""


class Moment2dError(Exception):
    """Base class for all package errors."""


class SchemaError(Moment2dError):
    """Malformed input document (JSON schema or value constraints)."""


class IndexOutOfRangeError(Moment2dError):
    """A requested moment index lies outside the stored rectangle."""


class NegativeDenominatorError(Moment2dError):
    """A Carleman-type denominator is negative; the table is not usable."""


class NotPsdError(Moment2dError):
    """A moment matrix has an eigenvalue below the negativity tolerance."""


class InconsistentShiftError(Moment2dError):
    """A shifted Gram column leaves the retained quotient span."""


class DomainCollapseError(Moment2dError):
    """An operator domain came out zero-dimensional."""


class SingularShiftError(Moment2dError):
    """A shift action could not be solved for (degenerate least squares)."""


class FixedPointError(Moment2dError):
    """A unitary operator has a fixed point; its inverse Cayley transform
    does not exist."""


class ContractionViolatedError(Moment2dError):
    """A parameter matrix has a singular value above 1 + tolerance."""


class NotUnitaryError(Moment2dError):
    """A matrix expected to be unitary is not, within tolerance."""


class EmbeddingLostError(Moment2dError):
    """The embedded subspace fell outside a reduced space."""


class NotDirectSumError(Moment2dError):
    """A sum of subspaces expected to be direct has nontrivial overlap."""


class NoDecompositionError(Moment2dError):
    """A vector admits no decomposition within the residual gate."""


class NotSupportedError(Moment2dError):
    """The requested evaluation lies outside the supported scope."""


class CommutationViolatedError(Moment2dError):
    """An extension parameter fails the commutation requirement."""


class ExcludedPointError(Moment2dError):
    """An evaluation point lies in an excluded neighborhood or outside
    the declared domain."""


class AdmissibilityFailedError(Moment2dError):
    """An extension parameter fails the admissibility criterion."""


class PointMismatchError(Moment2dError):
    """Evaluation points of two samples do not correspond under the
    Moebius map, or lie in excluded neighborhoods."""


class SingularMatrixError(Moment2dError):
    """A matrix that must be inverted is numerically singular."""


class ClusterAmbiguityError(Moment2dError):
    """Joint eigenvalue clusters could not be separated after retries."""


class NotSelfAdjointA2Error(Moment2dError):
    """The second operator is not self-adjoint, so the pipeline that
    requires it stops.  Carries diagnostic defect indices when known."""

    def __init__(self, message: str, defect_a1: int | None = None,
                 defect_a2: int | None = None):
        super().__init__(message)
        self.defect_a1 = defect_a1
        self.defect_a2 = defect_a2


class StructureViolationError(Moment2dError):
    """A structural invariant (subspace invariance, isometry range,
    direct-sum bookkeeping) failed numerically."""
