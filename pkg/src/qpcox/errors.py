"""Exception types shared across the package."""


class QpcoxError(Exception):
    """Base class for all qpcox errors."""


class BadMatrix(QpcoxError):
    """Malformed Coxeter matrix or unparseable type string."""


class NotFinite(QpcoxError):
    """A finite system was requested but the bilinear form is not positive definite."""


class SystemMismatch(QpcoxError):
    """Operands belong to different Coxeter systems."""


class InfiniteParabolic(QpcoxError):
    """The requested standard parabolic subgroup is infinite."""


class TruncationRequired(QpcoxError):
    """An enumeration over an infinite group needs an explicit height cutoff."""


class NoMinimal(QpcoxError):
    """No W-minimal element is reachable (typically hidden by a truncation)."""


class NotQuasiparabolic(QpcoxError):
    """An operation requiring the quasiparabolic axioms was called on a set failing them."""


class NotInvolutionClass(QpcoxError):
    """Perfectness is only defined for classes of twisted involutions."""


class NoUniqueMinimal(QpcoxError):
    """Structure checks need a class with a unique minimal element."""


class SkewViolation(QpcoxError):
    """solve_skew received data that is not skew-symmetric under the bar involution.

    During canonical basis construction this certifies that the supplied bar
    operator data is inconsistent, i.e. no canonical basis exists for it.
    """
