"""Exception types shared across the package.

Every failure mode of the library maps to exactly one of these classes; the
CLI turns each class into a stable exit code (see `banded_darboux.cli`).
"""


class BandedDarbouxError(Exception):
    """Base class for all library errors."""


class NotSquare(BandedDarbouxError):
    """Determinant requested for a non-square matrix."""


class ShapeMismatch(BandedDarbouxError):
    """Incompatible matrix/vector shapes in a dense operation."""


class SizeMismatch(BandedDarbouxError):
    """Incompatible truncation sizes in a banded product."""


class NonzeroRemainder(BandedDarbouxError):
    """Division of a polynomial by (z - c) left a remainder.

    The divisions performed by this library are exact by theory, so a nonzero
    remainder signals a violated identity upstream, not a user error.
    """


class SingularLeadingMinor(BandedDarbouxError):
    """det(C*I_n - J_n) = 0 for some leading minor, so J - C*I has no LU.

    `index` is the smallest n with a vanishing minor (equivalently the
    smallest n with P_n(C) = 0).
    """

    def __init__(self, index, message=None):
        self.index = index
        super().__init__(message or f"leading minor {index} of C*I - J is singular")


class ZeroPeelPivot(BandedDarbouxError):
    """A band-peeling divisor vanished while splitting L into bidiagonals."""

    def __init__(self, stage, row):
        self.stage = stage
        self.row = row
        super().__init__(f"zero peeling pivot at stage {stage}, row {row}")


class BadFreeSpec(BandedDarbouxError):
    """Free-entry table has the wrong shape for the requested band count."""


class IndexOutOfRange(BandedDarbouxError):
    """An index fell outside its documented range."""


class DegreeExceedsMoments(BandedDarbouxError):
    """A functional was applied to a polynomial beyond its moment budget."""

    def __init__(self, degree, max_degree):
        self.degree = degree
        self.max_degree = max_degree
        super().__init__(f"degree {degree} exceeds moment budget {max_degree}")


class InsufficientMoments(BandedDarbouxError):
    """Too few moments to apply a degree-consuming operation."""


class NotMonicOrDegreeGap(BandedDarbouxError):
    """A polynomial sequence is not monic with exact degrees 0, 1, 2, ..."""


class LadderViolation(BandedDarbouxError):
    """Coefficient ladder breaks the staircase shape or its regularity.

    `row`/`col` locate the offending coefficient, `value` carries it.
    """

    def __init__(self, row, col, value=None, message=None):
        self.row = row
        self.col = col
        self.value = value
        super().__init__(message or f"ladder violation at ({row}, {col}): {value}")


class HypothesisViolated(BandedDarbouxError):
    """A required staircase minor vanished: no factorization with the wanted
    orthogonality transport exists along this route.

    `stage` and `size` locate the zero minor.
    """

    def __init__(self, stage, size, value=None):
        self.stage = stage
        self.size = size
        self.value = value
        super().__init__(f"staircase minor (stage {stage}, size {size}) is zero")


class ConsistencyFailure(BandedDarbouxError):
    """The last-row side condition of a stage-ladder solve failed.

    Signals free entries inconsistent with the ladder being transported.
    """

    def __init__(self, k, message=None):
        self.k = k
        super().__init__(message or f"stage-ladder side condition failed at row {k}")


class InternalCheckError(BandedDarbouxError):
    """A redundant cross-computation disagreed with the primary one."""


class GenerationExhausted(BandedDarbouxError):
    """Random instance generation hit its retry cap."""


class ConfigError(BandedDarbouxError):
    """Invalid run configuration."""
