"""Exception types shared across the package."""


class SubtokError(Exception):
    """Base class for all errors raised by subtok."""


class MarkerCollisionError(SubtokError):
    """The word-boundary marker occurs in the raw input text."""


class InvalidUtf8Error(SubtokError):
    """Input bytes are not valid UTF-8.

    ``byte_offset`` is the offset of the offending byte in the decoded
    stream (for plain files this is the file offset; for gzip input it is
    the offset within the decompressed stream).
    """

    def __init__(self, message: str, byte_offset: int):
        super().__init__(message)
        self.byte_offset = byte_offset


class EmptyCorpusError(SubtokError):
    """An operation that needs corpus content received an empty corpus."""


class InfeasibleVocabError(SubtokError):
    """The requested vocabulary size cannot be satisfied."""


class ModelFormatError(SubtokError):
    """A model file violates the on-disk format contract."""


class ReferenceFormatError(SubtokError):
    """A morphological reference file is malformed."""
