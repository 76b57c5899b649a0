"""Exception hierarchy shared by every module.

Everything derives from Gl2LocalError so callers can catch the whole
family with one clause.  Subclasses split along user-input problems
(BadInput) versus internal consistency failures (InternalCheckFailed):
the latter indicate a bug or a genuinely inconsistent parameter set and
carry enough context in their message to reproduce.
"""


class Gl2LocalError(Exception):
    """Base class for all package errors."""


class BadInput(Gl2LocalError, ValueError):
    """User-supplied parameters are out of range or malformed."""


class InternalCheckFailed(Gl2LocalError, AssertionError):
    """A consistency check that should always hold did not."""


# --- field / table construction -----------------------------------------

class CompositeP(BadInput):
    """p was not prime."""


class TableTooLarge(BadInput):
    """Requested discrete-log table exceeds the size cap."""


class NoEmbedding(BadInput):
    """No field embedding exists for the requested degrees."""


class ZeroArgument(BadInput):
    """A multiplicative character or inverse was evaluated at zero."""


# --- exact arithmetic -----------------------------------------------------

class ConductorMismatch(BadInput):
    """Cyclotomic integers from incompatible conductors were combined."""


class PrecisionLoss(Gl2LocalError):
    """A p-adic operation would need more precision than is carried."""


class NonIntegral(Gl2LocalError):
    """A quantity expected to be a p-adic integer had negative valuation."""


# --- parameter calculus ---------------------------------------------------

class PreconditionViolated(BadInput):
    """Genericity or range conditions on the parameters fail."""


class InconsistentValues(Gl2LocalError):
    """Two independent computations of the same value disagree."""


class ZeroScale(BadInput):
    """A rescaling vector contained a non-unit entry."""


class InvalidModule(BadInput):
    """An integral descent datum violates its shape conditions."""


class BoundaryJ(BadInput):
    """The subset J was empty or full where a proper subset is required."""


# --- sums and models ------------------------------------------------------

class DegenerateSum(Gl2LocalError):
    """A character sum vanished where a unit was required."""


class ProjectionVanished(InternalCheckFailed):
    """A character projection that must be nonzero came out zero."""


class DepthExceeded(BadInput):
    """Requested congruence depth is beyond what the model supports."""


class InconsistentSolve(Gl2LocalError):
    """An overdetermined linear solve had no consistent solution."""


class IdentityFailed(InternalCheckFailed):
    """A verification identity that must hold exactly did not."""


# --- representation theory ------------------------------------------------

class FieldTooLarge(BadInput):
    """The coefficient field needed exceeds the supported table cap."""


class GroupTooLarge(BadInput):
    """The finite matrix group is too large for exact enumeration."""


class DecompositionFailed(Gl2LocalError):
    """No nonnegative integral decomposition into irreducibles exists."""
