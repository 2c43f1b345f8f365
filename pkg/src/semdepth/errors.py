"""Exception hierarchy.

Three branches map onto the CLI exit codes: FormatError -> 2,
ValidationError -> 3, EvaluationError -> 4.
"""


class SemDepthError(Exception):
    """Base class for all errors raised by this package."""


class FormatError(SemDepthError):
    """A file or byte stream does not conform to its documented layout."""


class BadMagic(FormatError):
    pass


class UnsupportedVersion(FormatError):
    pass


class UnsupportedRank(FormatError):
    pass


class TruncatedPayload(FormatError):
    pass


class MetadataMismatch(FormatError):
    pass


class ManifestError(FormatError):
    """Malformed manifest record, duplicate image_id, or unresolvable path."""


class ValidationError(SemDepthError):
    """Inputs violate a documented invariant or pairing contract."""


class ChannelMismatch(ValidationError):
    pass


class ArityMismatch(ValidationError):
    pass


class ZeroNormVector(ValidationError):
    pass


class ShapeError(ValidationError):
    pass


class IndexOutOfRange(ValidationError):
    pass


class EvaluationError(SemDepthError):
    """Evaluation could not be carried out on the given data."""


class ShapeMismatch(EvaluationError):
    pass


class EmptyMask(EvaluationError):
    pass


class NonPositivePrediction(EvaluationError):
    pass


class EmptyClassFilter(EvaluationError):
    pass


class MissingTextBank(EvaluationError):
    pass
