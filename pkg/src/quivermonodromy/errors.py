"""Exception types raised across the package.

Every error carries a human-readable message naming the offending
object (arrow, marked point, component, factor) so the CLI can print it.
"""


class QuiverMonodromyError(Exception):
    """Base class for all package errors."""


class ValidationError(QuiverMonodromyError, ValueError):
    """Malformed quiver, weight, or representation data."""


class ShapeMismatch(ValidationError):
    pass


class ResonantSet(QuiverMonodromyError, ValueError):
    """Two distinct members of an eigenvalue set differ by a nonzero integer."""


class SpectrumOutsideT(QuiverMonodromyError):
    pass


class SpectrumOutsideS(QuiverMonodromyError):
    pass


class BranchAmbiguity(QuiverMonodromyError):
    pass


class EigenSolverFailure(QuiverMonodromyError):
    pass


class GenusNotZero(QuiverMonodromyError):
    pass


class RequiresNonInterfering(QuiverMonodromyError):
    pass


class SingularMonodromy(QuiverMonodromyError):
    pass


class SingularFactor(QuiverMonodromyError):
    pass


class RelationDefect(QuiverMonodromyError):
    pass


class NotNilpotent(QuiverMonodromyError):
    pass


class AtPole(QuiverMonodromyError):
    pass


class StepSizeUnderflow(QuiverMonodromyError):
    pass


class ClearanceViolated(QuiverMonodromyError):
    pass


class MultiplePolesEnclosed(QuiverMonodromyError):
    pass


class NonNilpotentResidue(QuiverMonodromyError):
    pass
