"""Exception types shared across the package."""


class QPowerError(Exception):
    """Base class for all qpower errors."""


class CapacityError(QPowerError, ValueError):
    """Requested problem size exceeds a configured resource cap."""


class DimensionMismatchError(QPowerError, ValueError):
    """Operator and state (or matrices of an instance) disagree on size."""


class UnitarityError(QPowerError, ValueError):
    """A dense operator failed the unitarity check on construction."""


class DegenerateIterateError(QPowerError, ArithmeticError):
    """The shifted step annihilated the iterate: v lies in the eigenspace
    of the shift value, so (eta*I - U) v = 0."""


class DeadBranchError(QPowerError, RuntimeError):
    """The requested measurement branch has zero probability."""


class ConstantObjectiveError(QPowerError, ValueError):
    """Objective bounds coincide; no phase scaling exists."""


class PenaltyTooSmallError(QPowerError, ValueError):
    """Constraint penalty does not dominate the objective spread."""
