"""Exception hierarchy.

Every error carries the CLI exit code it maps to, so the command line layer
can translate failures without a lookup table.
"""


class ZetaCLTError(Exception):
    exit_code = 1


class BadParams(ZetaCLTError, ValueError):
    exit_code = 3


class ResourceCap(ZetaCLTError, RuntimeError):
    exit_code = 4


class NotALaw(BadParams):
    """Total mass differs from one."""


class DegenerateLaw(BadParams):
    """Zero standard deviation."""


class MassNotZero(BadParams):
    """A norm defined only on mass-zero measures got something else."""


class MomentsNotZero(BadParams):
    """The measure is not in M_{m,m} (some moment of order <= m is nonzero)."""


class ZeroAtOne(BadParams):
    """A modulus vanishing at 1 cannot be normalised."""


class InfeasibleGrid(BadParams):
    """The LP grid does not cover the support hull of the measure."""


class SolverFailure(ZetaCLTError, RuntimeError):
    pass


class InadmissibleParams(BadParams):
    pass


class ZetaTooLarge(BadParams):
    """The zeta_{2,delta} precondition of the closed-form bound is not established."""


class LambdaTooSmall(BadParams):
    pass


class GapNotReached(UserWarning):
    """Issued when grid refinement stops before the requested relative gap."""
