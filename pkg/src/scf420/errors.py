"""Exception hierarchy shared by every codec layer."""


class ScfError(Exception):
    """Base class for all codec errors."""


class FormatError(ScfError):
    """Input file does not match the declared layout."""


class DimensionError(ScfError):
    """Image dimensions are empty, odd where even is required, or inconsistent."""


class ParameterError(ScfError, ValueError):
    """A numeric parameter is outside its permitted grid."""


class UsageError(ScfError):
    """An operation was called on the wrong kind of input."""


class ModelError(ScfError):
    """A probability model produced an uncodable interval."""


class StreamError(ScfError):
    """Entropy-coded data is truncated or inconsistent."""


class TableCorruptionError(StreamError):
    """Chroma range tables exclude a value that must be codable."""


class ContainerError(ScfError):
    """Bitstream header, chunk layout or checksum is invalid."""
