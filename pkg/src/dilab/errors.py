"""Exception types raised by the laboratory.

Every failure mode that a caller can act on gets its own class so the service
layer can map it to a status without string matching.
"""


class LabError(Exception):
    """Base class for all laboratory errors."""


class NotHermitian(LabError):
    """Matrix expected to be Hermitian is not, beyond tolerance."""


class NotPSD(LabError):
    """Hermitian matrix has an eigenvalue below the negative tolerance."""


class EigenFailure(LabError):
    """The eigenvalue solver failed to converge."""


class CodimensionMismatch(LabError):
    """Domain and codomain of a partial isometry have unequal codimensions."""


class NotIsometric(LabError):
    """A map that must be isometric fails the Gram identity."""


class NotContraction(LabError):
    """Operator norm exceeds 1 beyond tolerance."""


class NotPure(LabError):
    """A contraction required to be pure fails the purity gate."""


class NotCommuting(LabError):
    """Commutator norm of a would-be commuting pair exceeds tolerance."""


class InvalidPowers(LabError):
    """Shift powers outside the valid range for the ambient dimension."""


class ExtensionFailure(LabError):
    """The defect isometry could not be extended to a unitary."""


class NearSingularResolvent(LabError):
    """Resolvent (I - zD) is numerically singular at the requested point."""


class TripleMismatch(LabError):
    """The supplied unitary triple does not match the pair's defect data."""


class HypothesisViolated(LabError):
    """A structural hypothesis (e.g. equal defect operators) does not hold."""
