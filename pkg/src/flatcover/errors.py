"""Exception types shared across the package."""


class FlatcoverError(Exception):
    """Base class for all package-specific errors."""


class DimensionMismatchError(FlatcoverError, ValueError):
    """Operands live in different ambient dimensions."""


class ScalarModeError(FlatcoverError, TypeError):
    """Exact-rational and float64 objects were mixed in one operation."""


class RankDeficiencyError(FlatcoverError, ValueError):
    """A basis or point set does not have the rank the operation requires."""


class AffineDependenceError(FlatcoverError, ValueError):
    """Points supplied to an exact-span operation are affinely dependent."""


class GuardLimitError(FlatcoverError, RuntimeError):
    """An enumeration-size guard tripped; the instance is too large for exact mode."""


class IntegrityError(FlatcoverError, RuntimeError):
    """A reduction invariant that should hold by construction was violated."""
