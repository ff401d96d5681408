"""Corpus ingestion: normalized, marker-prefixed word counts.

Both trainers consume a :class:`WordCounts`: a multiset of words, each
prefixed with a single word-boundary marker code point. Counting is exact
(no case folding) and deterministic: identical input bytes always produce
identical counts. Text is NFC-normalized before splitting so that the
same visible string always counts as the same word.
"""

import codecs
import gzip
import hashlib
import sys
import unicodedata
from collections import Counter
from collections.abc import Iterable, Iterator
from dataclasses import dataclass
from typing import BinaryIO

from .errors import InvalidUtf8Error, MarkerCollisionError

DEFAULT_MARKER = "▁"  # LOWER ONE EIGHTH BLOCK; avoids clashing with literal "_"

_READ_CHUNK = 1 << 20


@dataclass(frozen=True)
class WordCounts:
    """Multiset of marker-prefixed words.

    Keys begin with exactly one marker code point and contain no
    whitespace. Instances are treated as immutable after construction and
    are safe to share across threads.
    """

    entries: dict[str, int]
    marker: str = DEFAULT_MARKER

    def __post_init__(self):
        if len(self.marker) != 1:
            raise ValueError("marker must be a single code point")
        for word, count in self.entries.items():
            if not word or word[0] != self.marker:
                raise ValueError(f"word {word!r} does not start with the marker")
            if self.marker in word[1:]:
                raise ValueError(f"word {word!r} contains an interior marker")
            if any(ch.isspace() for ch in word):
                raise ValueError(f"word {word!r} contains whitespace")
            if count < 1:
                raise ValueError(f"count for {word!r} must be >= 1, got {count}")

    @property
    def total_words(self) -> int:
        return sum(self.entries.values())

    @property
    def total_word_types(self) -> int:
        return len(self.entries)

    def merged_with(self, other: "WordCounts") -> "WordCounts":
        """Combine two count shards; commutative and associative."""
        if other.marker != self.marker:
            raise ValueError("cannot merge counts with different markers")
        merged = Counter(self.entries)
        merged.update(other.entries)
        return WordCounts(dict(merged), self.marker)


@dataclass(frozen=True)
class CharInventory:
    """Set of code points occurring in any counted word (marker included)."""

    chars: frozenset[str]

    def __len__(self) -> int:
        return len(self.chars)

    def __contains__(self, item: str) -> bool:
        return item in self.chars


def char_inventory(counts: WordCounts) -> CharInventory:
    """Exactly the set of code points occurring in the keys of ``counts``."""
    chars: set[str] = set()
    for word in counts.entries:
        chars.update(word)
    return CharInventory(frozenset(chars))


def ingest(text: str, marker: str = DEFAULT_MARKER, mode: str = "whitespace") -> WordCounts:
    """Count marker-prefixed words in ``text``.

    ``mode="whitespace"`` splits on Unicode whitespace; ``mode="line"``
    treats each line as one word (for scripts written without
    whitespace). In line mode any whitespace inside a line is dropped,
    since word keys may not contain whitespace. Empty units are skipped.

    Raises :class:`MarkerCollisionError` if the marker code point occurs
    in the (normalized) input.
    """
    return _ingest_lines(text.split("\n"), marker, mode)


def ingest_path(path: str, marker: str = DEFAULT_MARKER, mode: str = "whitespace") -> WordCounts:
    """Ingest a UTF-8 text file; ``-`` reads standard input.

    Files ending in ``.gz`` are transparently decompressed.
    """
    if path == "-":
        return ingest_stream(sys.stdin.buffer, marker, mode)
    opener = gzip.open if path.endswith(".gz") else open
    with opener(path, "rb") as raw:
        return ingest_stream(raw, marker, mode)


def ingest_stream(raw: BinaryIO, marker: str = DEFAULT_MARKER, mode: str = "whitespace") -> WordCounts:
    """Ingest a binary stream of UTF-8 text without loading it whole."""
    return _ingest_lines(_decode_lines(raw), marker, mode)


def _ingest_lines(lines: Iterable[str], marker: str, mode: str) -> WordCounts:
    if mode not in ("whitespace", "line"):
        raise ValueError(f"unknown ingest mode: {mode!r}")
    entries: Counter[str] = Counter()
    for line in lines:
        line = unicodedata.normalize("NFC", line)
        if marker in line:
            raise MarkerCollisionError(
                f"marker {marker!r} (U+{ord(marker):04X}) occurs in the input text"
            )
        if mode == "whitespace":
            for unit in line.split():
                entries[marker + unit] += 1
        else:
            unit = "".join(ch for ch in line if not ch.isspace())
            if unit:
                entries[marker + unit] += 1
    return WordCounts(dict(entries), marker)


def _decode_lines(raw: BinaryIO) -> Iterator[str]:
    """Yield text lines from a binary stream, reporting exact byte offsets
    for invalid UTF-8."""
    decoder = codecs.getincrementaldecoder("utf-8")()
    consumed = 0
    pending = ""
    while True:
        chunk = raw.read(_READ_CHUNK)
        buffered = len(decoder.getstate()[0])
        try:
            text = decoder.decode(chunk) if chunk else decoder.decode(b"", final=True)
        except UnicodeDecodeError as exc:
            # exc.start is relative to the decoder's carried-over bytes
            # plus the current chunk.
            offset = consumed - buffered + exc.start
            raise InvalidUtf8Error(f"invalid UTF-8 at byte offset {offset}", offset) from exc
        consumed += len(chunk)
        pending += text
        if not chunk:
            break
        parts = pending.split("\n")
        pending = parts.pop()
        yield from parts
    if pending:
        yield pending


def counts_digest(counts: WordCounts) -> str:
    """Stable content digest of a WordCounts, independent of entry order."""
    h = hashlib.sha256()
    for word in sorted(counts.entries):
        h.update(word.encode("utf-8"))
        h.update(b"\t")
        h.update(str(counts.entries[word]).encode("ascii"))
        h.update(b"\n")
    return "sha256:" + h.hexdigest()
