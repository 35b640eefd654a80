"""Exception hierarchy.

Every error raised on purpose by this package derives from :class:`AltseqError`,
split into two broad branches that the CLI maps to distinct exit codes:
``ValidationError`` for bad inputs (exit 2) and ``NumericalError`` for
computations that could not be completed (exit 3).
"""


class AltseqError(Exception):
    """Base class for all errors raised by altseq."""


class ValidationError(AltseqError):
    """Input outside its documented domain, or a malformed file/schema."""


class DomainError(ValidationError):
    """A numeric argument outside the domain of a math operation."""


class SchemaError(ValidationError):
    """A session/config document that does not match the expected schema."""


class InsufficientDataError(ValidationError):
    """Too few observations (or too little structure) to attempt estimation."""


class CampaignCompleteError(ValidationError):
    """The planned number of sequential runs has already been consumed."""


class NumericalError(AltseqError):
    """A computation failed for numerical reasons."""


class EstimationError(NumericalError):
    """Maximum likelihood estimation did not produce a usable optimum."""


class SamplerError(NumericalError):
    """The posterior sampler failed (e.g. acceptance rate collapsed)."""


class SingularMatrixError(NumericalError):
    """An information matrix was singular beyond what the ridge policy repairs."""


class CriterionError(NumericalError):
    """A design criterion could not be evaluated at any posterior draw."""


class PlanningError(NumericalError):
    """No candidate stress level produced a usable criterion value."""
