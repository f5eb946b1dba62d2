"""Exception hierarchy shared by all sisexplorer modules.

The service maps these onto HTTP status codes and the CLI onto exit
codes, so raising the right class matters more than the message text.
"""


class ExplorerError(Exception):
    """Base class for all errors raised by this package."""

    code = "error"


class DomainError(ExplorerError):
    """An argument lies outside the mathematical domain of an operation."""

    code = "domain_error"


class ValidationError(ExplorerError):
    """A request, filter or model specification is malformed."""

    code = "validation_error"


class SchemaError(ExplorerError):
    """Input data does not match the expected column schema."""

    code = "schema_error"


class EncodingError(ExplorerError):
    """Input bytes are not valid UTF-8."""

    code = "encoding_error"

    def __init__(self, message: str, byte_offset: int | None = None):
        super().__init__(message)
        self.byte_offset = byte_offset


class EmptyInputError(ExplorerError):
    """The input contains no data rows at all."""

    code = "empty_input"


class InsufficientDataError(ExplorerError):
    """Too few observations for the requested computation."""

    code = "insufficient_data"


class NumericError(ExplorerError):
    """An iterative numeric routine failed to converge, or inputs are not finite."""

    code = "numeric_error"


class BoundsError(ValidationError):
    """A size or index argument is out of bounds for the given data."""

    code = "bounds_error"


class DegeneratePredictorError(ValidationError):
    """A categorical predictor has a single level and cannot be encoded."""

    code = "degenerate_predictor"


class UnseenLevelError(ValidationError):
    """New data contains a categorical level absent from the fitted encoding."""

    code = "unseen_level"


class SchemaMismatchError(ValidationError):
    """A design matrix does not match the terms of the fit it is used with."""

    code = "schema_mismatch"
