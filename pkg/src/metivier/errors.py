"""Exception hierarchy for the metivier package."""


class MetivierError(Exception):
    """Base class for all package-specific errors."""


class DimensionMismatch(MetivierError):
    """Array shapes or vector lengths do not match the declared dimensions."""


class NotSkewSymmetric(MetivierError):
    """A structure matrix fails the skew-symmetry tolerance."""

    def __init__(self, index, defect):
        self.index = index
        self.defect = defect
        super().__init__(
            f"structure matrix {index} is not skew-symmetric "
            f"(max |U + U^T| = {defect:.3e})"
        )


class DependentStructureMatrices(MetivierError):
    """The structure matrices are linearly dependent."""


class SingularPencil(MetivierError):
    """V_lambda is numerically singular at the requested lambda."""


class NonConvergence(MetivierError):
    """An iterative solver failed to converge."""


class RangeExceeded(MetivierError):
    """An index or argument is outside the documented stable range."""


class OutOfDomain(MetivierError):
    """A requested evaluation point lies outside the grid support."""


class UnsupportedDimension(MetivierError):
    """The operation is only implemented for n in {1, 2}."""


class NonFiniteValue(MetivierError):
    """A sampled expression returned NaN or infinity."""

    def __init__(self, node):
        self.node = node
        super().__init__(f"non-finite value at grid node {node}")


class GridMismatch(MetivierError):
    """Two fields do not share the same grid."""


class MalformedFile(MetivierError):
    """A field or structure file violates the documented layout."""


class VersionMismatch(MetivierError):
    """A field file declares an unsupported format version."""


class TruncationDominates(MetivierError):
    """Estimated truncation error exceeds the requested tolerance."""


class NyquistViolation(MetivierError):
    """Requested angular/center mode exceeds the grid band limit."""


class NotHomogeneous(MetivierError):
    """Input field fails the m-homogeneity check."""


class GridTooCoarse(MetivierError):
    """Finite-difference Richardson check exceeded its tolerance."""


class NoUsableRadius(MetivierError):
    """Every degree was unrecoverable from the supplied radii."""


class InadmissibleRadii(MetivierError):
    """The radius pair fails the two-radii admissibility check."""
