"""Exception types shared across the package."""


class CosfilterError(Exception):
    """Base class for all package-specific errors."""


class MalformedHeader(CosfilterError):
    """DIMACS input lacks a valid `p cnf` header or contradicts it."""


class NonThreeSatClause(CosfilterError):
    """A parsed clause does not contain exactly three literals."""


class VariableOutOfRange(CosfilterError):
    """A literal references a variable index outside the declared range."""


class DuplicateVariableInClause(CosfilterError):
    """A clause mentions the same variable more than once."""


class TooLarge(CosfilterError):
    """Problem size exceeds a dense-simulation bound."""


class DimensionMismatch(CosfilterError):
    """Operands act on registers of different sizes."""


class ZeroNorm(CosfilterError):
    """A state norm collapsed below the usable floor (post-selection died)."""


class SeriesRegimeError(CosfilterError):
    """cos/sin series requested outside its guaranteed-convergence window."""


class SeriesNonConvergence(CosfilterError):
    """cos/sin series failed to reach tolerance within the term cap."""


class NonDiagonalHamiltonian(CosfilterError):
    """Operation requires a computational-basis-diagonal (Z-only) operator."""


class FidelityBelowFloor(CosfilterError):
    """State recording could not reach the minimum acceptable fidelity."""


class ConfigError(CosfilterError):
    """Experiment configuration is invalid."""
