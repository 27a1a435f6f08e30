"""Exception types shared across the engine.

Every error raised by fieldvis derives from :class:`FieldVisError` so callers
(CLI, session service) can map failures to stable diagnostics and exit codes.
"""

from __future__ import annotations


class FieldVisError(Exception):
    """Base class for all fieldvis errors."""


class ManifestParseError(FieldVisError):
    """Dataset manifest is missing, malformed, or inconsistent."""


class MissingFileError(FieldVisError):
    """A raw data file referenced by the manifest does not exist."""


class TruncatedDataError(FieldVisError):
    """A raw data file has the wrong byte length."""

    def __init__(self, path, expected: int, got: int):
        super().__init__(f"{path}: expected {expected} bytes, got {got}")
        self.path = str(path)
        self.expected = expected
        self.got = got


class NonFiniteError(FieldVisError):
    """Loaded data contains NaN or Inf voxels."""


class OutOfDomainError(FieldVisError):
    """A query point lies outside the grid's domain bounds."""

    def __init__(self, point):
        super().__init__(f"point {tuple(float(c) for c in point)} outside domain")
        self.point = tuple(float(c) for c in point)


class DegenerateSeedError(FieldVisError):
    """Field magnitude at a seed point is below the stagnation threshold."""


class ConeOutsideDomainError(FieldVisError):
    """Cone seeding failed to produce in-domain points after many rejections."""


class IndexOutOfRangeError(FieldVisError):
    """A slice index is outside the grid dimensions."""


class DegenerateNormalError(FieldVisError):
    """A plane orientation request hit a (near-)zero vector."""


class RecipeInvalidError(FieldVisError):
    """A visualization recipe does not validate against the loaded dataset."""


class UnknownMethodError(RecipeInvalidError):
    """A recipe names a visualization method that does not exist."""


class UnknownFieldError(RecipeInvalidError):
    """A recipe references a field name absent from the dataset."""


class InvalidParamsError(RecipeInvalidError):
    """Method parameters are missing, mistyped, or out of range."""


class ParamParseError(FieldVisError):
    """A parameter file is not valid JSON or has the wrong structure."""


class BadMagicError(FieldVisError):
    """A binary file does not start with the expected magic bytes."""


class CorruptFrameError(FieldVisError):
    """A baked frame file is truncated or internally inconsistent."""


class BadStepError(FieldVisError):
    """A requested time step is outside [0, steps)."""


class IoError(FieldVisError):
    """Filesystem writes failed (unwritable directory, disk error)."""
