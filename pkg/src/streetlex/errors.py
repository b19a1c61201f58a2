"""Exception types shared across the package."""


class StreetlexError(Exception):
    """Base class for errors raised by this package."""


class UsageError(StreetlexError):
    """The caller supplied bad input (file, flag, or precondition)."""


class DataFormatError(UsageError):
    """An input file is malformed beyond what can be skipped."""


class ArtifactVersionError(UsageError):
    """A persisted artifact has an unknown magic header or version."""


class ConfigMismatchError(UsageError):
    """An input artifact was produced under an incompatible configuration."""


class NoUnusedSeedsError(StreetlexError):
    """Every seed in the list has already been consumed."""


class SeedsNotInCorpusError(StreetlexError):
    """No unused seed occurs in the indexed corpus at all."""
