"""Exception hierarchy shared by every stage of the assessment pipeline."""


class OBDQAError(Exception):
    """Base class; ``code`` is the machine-readable token printed by the CLI."""

    code = "error"


class InvalidGeometryError(OBDQAError, ValueError):
    code = "invalid-geometry"


class DegenerateInputError(OBDQAError, ValueError):
    code = "degenerate-input"


class EmptyInputError(OBDQAError, ValueError):
    code = "empty-input"


class EmptyLayerError(EmptyInputError):
    code = "empty-layer"


class UnsupportedLatitudeError(OBDQAError, ValueError):
    code = "unsupported-latitude"


class OutOfZoneError(OBDQAError, ValueError):
    code = "out-of-zone"


class GridTooFineError(OBDQAError, ValueError):
    code = "grid-too-fine"


class UndefinedPercentageError(OBDQAError, ValueError):
    code = "undefined-percentage"


class UndefinedScoreError(OBDQAError, ValueError):
    code = "undefined-score"


class InsufficientGeometryError(OBDQAError, ValueError):
    code = "insufficient-geometry"


class RegistrationImpossibleError(OBDQAError, ValueError):
    code = "registration-impossible"


class SingularSystemError(OBDQAError, ValueError):
    code = "singular-system"


class DomainError(OBDQAError, ValueError):
    code = "domain"


class InsufficientSampleError(OBDQAError, ValueError):
    code = "insufficient-sample"


class DegenerateDensityError(OBDQAError, ValueError):
    code = "degenerate-density"


class DensityTooHighError(OBDQAError, RuntimeError):
    code = "density-too-high"


class UsageError(OBDQAError, ValueError):
    code = "usage"
