"""Exception hierarchy for the fusion evaluation harness.

Three base categories map onto CLI exit codes: bad or inconsistent input
data (exit 1), filesystem / external-process trouble (exit 2), and broken
internal invariants (exit 3).
"""


class FusevalError(Exception):
    """Base class for all harness errors."""

    exit_code = 3


class ValidationFailure(FusevalError):
    """Input data violates a documented contract (exit code 1)."""

    exit_code = 1


class IOFailure(FusevalError):
    """Missing, unreadable, or unwritable external resources (exit code 2)."""

    exit_code = 2


class InternalError(FusevalError):
    """A harness invariant broke; indicates a bug, not bad input (exit code 3)."""

    exit_code = 3


# --- image decoding -------------------------------------------------------

class MissingFile(IOFailure):
    pass


class UnsupportedFormat(IOFailure):
    pass


class CorruptData(IOFailure):
    pass


# --- manifest -------------------------------------------------------------

class SchemaViolation(ValidationFailure):
    pass


class DuplicatePairId(ValidationFailure):
    pass


class DanglingPath(ValidationFailure):
    pass


class UnalignedPair(ValidationFailure):
    """Metric evaluation requested on a pair whose aligned flag is false."""


# --- geometry / metrics ---------------------------------------------------

class DimensionMismatch(ValidationFailure):
    pass


class ImageTooSmall(ValidationFailure):
    pass


class SingularHomography(ValidationFailure):
    pass


class EmptyOverlap(ValidationFailure):
    pass


# --- detection evaluation -------------------------------------------------

class MalformedLine(ValidationFailure):
    pass


class OutOfRangeValue(ValidationFailure):
    pass


class MissingImageEntry(ValidationFailure):
    pass


class NoAnnotatedImages(ValidationFailure):
    pass


# --- speed harness --------------------------------------------------------

class CommandFailed(IOFailure):
    pass


class MissingSidecar(IOFailure):
    pass


class NoTimingData(IOFailure):
    pass


# --- results store / reporting -------------------------------------------

class DuplicateRecord(ValidationFailure):
    pass


class EmptyCell(ValidationFailure):
    pass


class MissingFusedImage(IOFailure):
    pass
