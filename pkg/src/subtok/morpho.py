"""Boundary-level scoring of tokenizer output against morphological
reference segmentations.

A reference segmentation splits a word into morphs; the tokenizer's
segmentation of the same word induces a set of internal split offsets.
Precision/recall/F1 over those offsets, weighted by word frequency and
restricted to words of two or more morphs, quantifies how closely a
tokenizer tracks morphology.
"""

import sys
import unicodedata
from dataclasses import dataclass

from .errors import ReferenceFormatError

MORPH_SEPARATOR = "|"


@dataclass(frozen=True)
class ReferenceSegmentation:
    """One gold segmentation: word (no marker), its morphs, and a
    non-negative frequency weight."""

    word: str
    morphs: tuple[str, ...]
    weight: float

    def __post_init__(self):
        if "".join(self.morphs) != self.word:
            raise ValueError(
                f"morphs {self.morphs!r} do not concatenate to {self.word!r}"
            )
        if not self.morphs or any(not m for m in self.morphs):
            raise ValueError("morphs must be a non-empty list of non-empty strings")
        if self.weight < 0:
            raise ValueError("weight must be non-negative")

    def boundary_offsets(self) -> set[int]:
        offsets = set()
        position = 0
        for morph in self.morphs[:-1]:
            position += len(morph)
            offsets.add(position)
        return offsets


@dataclass(frozen=True)
class BoundaryReport:
    """Frequency-weighted boundary precision/recall/F1.

    ``skipped_unk`` counts reference words whose tokenization contained
    the reserved unknown token and were therefore left out.
    """

    precision: float
    recall: float
    f1: float
    weighted_candidate_boundaries: float
    weighted_reference_boundaries: float
    weighted_matches: float
    references_used: int
    skipped_unk: int


def boundaries(tokens: list[str] | tuple[str, ...], marker: str | None = None) -> set[int]:
    """Internal split offsets of a segmentation.

    Offsets are cumulative code-point lengths of all tokens except the
    last. A leading marker on the first token is stripped first: the
    marker encodes the word-initial boundary, which is not an internal
    one, so a single-token word always yields the empty set.
    """
    if not tokens:
        return set()
    lengths = [len(t) for t in tokens]
    if marker and tokens[0].startswith(marker):
        lengths[0] -= len(marker)
    offsets = set()
    position = 0
    for length in lengths[:-1]:
        position += length
        if position > 0:
            offsets.add(position)
    return offsets


def boundary_prf(model, references: list[ReferenceSegmentation]) -> BoundaryReport:
    """Score a tokenizer against reference segmentations.

    Only references with two or more morphs participate; each word's
    boundary counts are multiplied by its weight. Words whose
    tokenization contains the reserved unknown token are skipped and
    reported in ``skipped_unk``.
    """
    multi = [ref for ref in references if len(ref.morphs) >= 2]
    if not multi:
        raise ValueError("no multimorphemic references")
    marker = model.marker
    unk = model.unk_token
    cand_total = 0.0
    ref_total = 0.0
    match_total = 0.0
    used = 0
    skipped = 0
    for ref in multi:
        tokens = model.tokenize(marker + ref.word)
        if unk in tokens:
            skipped += 1
            continue
        cand = boundaries(tokens, marker)
        gold = ref.boundary_offsets()
        cand_total += ref.weight * len(cand)
        ref_total += ref.weight * len(gold)
        match_total += ref.weight * len(cand & gold)
        used += 1
    precision = match_total / cand_total if cand_total > 0 else 0.0
    recall = match_total / ref_total if ref_total > 0 else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0
    return BoundaryReport(
        precision=precision,
        recall=recall,
        f1=f1,
        weighted_candidate_boundaries=cand_total,
        weighted_reference_boundaries=ref_total,
        weighted_matches=match_total,
        references_used=used,
        skipped_unk=skipped,
    )


def read_reference_file(path: str) -> list[ReferenceSegmentation]:
    """Parse a reference TSV: ``word<TAB>weight<TAB>morph|morph|...``.

    Morphs are separated by pipes; words containing literal pipes are not
    supported. Lines that are empty or start with ``#`` are ignored.
    ``-`` reads standard input.
    """
    if path == "-":
        return _parse_references(sys.stdin, path)
    with open(path, "r", encoding="utf-8") as fh:
        return _parse_references(fh, path)


def _parse_references(fh, path: str) -> list[ReferenceSegmentation]:
    references = []
    for lineno, line in enumerate(fh, start=1):
        line = line.rstrip("\n")
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 3:
            raise ReferenceFormatError(
                f"{path}:{lineno}: expected 3 tab-separated fields, got {len(parts)}"
            )
        word, weight_raw, morphs_raw = parts
        word = unicodedata.normalize("NFC", word)
        try:
            weight = float(weight_raw)
        except ValueError as exc:
            raise ReferenceFormatError(
                f"{path}:{lineno}: weight is not a number: {weight_raw!r}"
            ) from exc
        morphs = tuple(
            unicodedata.normalize("NFC", m) for m in morphs_raw.split(MORPH_SEPARATOR)
        )
        try:
            references.append(ReferenceSegmentation(word, morphs, weight))
        except ValueError as exc:
            raise ReferenceFormatError(f"{path}:{lineno}: {exc}") from exc
    return references
