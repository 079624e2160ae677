"""Exception hierarchy; the CLI maps each family to an exit code."""


class LiePairsError(Exception):
    """Base class for all library errors."""


class ValidationError(LiePairsError):
    """Input data violates a structural requirement (exit code 1)."""


class CatalogError(ValidationError):
    """Unknown catalog name or bad catalog parameters."""


class PreconditionError(ValidationError):
    """An operation was called outside its hypotheses."""


class NumericalError(LiePairsError):
    """Non-convergence or a failed numerical reconstruction (exit code 2)."""


class ReconstructionError(NumericalError):
    """Rational reconstruction of a spectrum failed."""


class ResidualGuardError(NumericalError):
    """A flow drifted off the variety beyond the configured guard."""
