"""Canonical on-disk model format.

A model file is a single JSON document with sorted keys and fixed float
formatting (17 significant digits), so training twice on identical input
yields byte-identical files and load(save(m)) is the identity. Floats are
stored as strings to pin the rendering.
"""

import json
import math
from dataclasses import dataclass
from typing import Any

from . import __version__
from .bpe import BpeModel
from .errors import ModelFormatError
from .unigram import UnigramModel

FORMAT_VERSION = 1


@dataclass(frozen=True)
class TrainingMetadata:
    """Provenance recorded next to the model payload."""

    k: int
    alpha: float | None
    corpus_digest: str
    mode: str
    tool_version: str = __version__


def _format_float(value: float) -> str:
    return format(value, ".17g")


def _parse_float(raw: Any, context: str) -> float:
    if not isinstance(raw, str):
        raise ModelFormatError(f"{context}: float values must be stored as strings")
    try:
        value = float(raw)
    except ValueError as exc:
        raise ModelFormatError(f"{context}: not a number: {raw!r}") from exc
    return value


def save_model(
    model: BpeModel | UnigramModel,
    path: str,
    metadata: TrainingMetadata | None = None,
) -> None:
    """Write a model as a canonical JSON document."""
    doc: dict[str, Any] = {
        "format_version": FORMAT_VERSION,
        "marker": model.marker,
        "unk_token": model.unk_token,
    }
    if isinstance(model, BpeModel):
        doc["kind"] = "bpe"
        doc["merges"] = [[left, right] for left, right in model.merges]
        doc["vocab"] = sorted(model.vocab)
    elif isinstance(model, UnigramModel):
        doc["kind"] = "unigram"
        doc["logprobs"] = {
            token: _format_float(lp) for token, lp in sorted(model.logprobs.items())
        }
    else:
        raise TypeError(f"cannot serialize {type(model).__name__}")
    if metadata is not None:
        doc["training_metadata"] = {
            "alpha": None if metadata.alpha is None else _format_float(metadata.alpha),
            "corpus_digest": metadata.corpus_digest,
            "k": metadata.k,
            "mode": metadata.mode,
            "tool_version": metadata.tool_version,
        }
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(doc, fh, ensure_ascii=False, sort_keys=True, indent=2)
        fh.write("\n")


def load_model(path: str) -> tuple[BpeModel | UnigramModel, dict[str, Any]]:
    """Load a model file, validating the format contract.

    Returns the model and the raw training metadata (empty dict when the
    file carries none). Raises :class:`ModelFormatError` naming the failed
    invariant on corrupt input.
    """
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise ModelFormatError(f"not a valid model document: {exc}") from exc
    if not isinstance(doc, dict):
        raise ModelFormatError("model document must be a JSON object")

    version = doc.get("format_version")
    if version != FORMAT_VERSION:
        raise ModelFormatError(f"unsupported format_version: {version!r}")
    kind = doc.get("kind")
    if kind not in ("bpe", "unigram"):
        raise ModelFormatError(f"kind must be 'bpe' or 'unigram', got {kind!r}")
    marker = doc.get("marker")
    if not isinstance(marker, str) or len(marker) != 1:
        raise ModelFormatError("marker must be a single code point")
    unk_token = doc.get("unk_token")
    if not isinstance(unk_token, str) or not unk_token:
        raise ModelFormatError("unk_token must be a non-empty string")

    if kind == "bpe":
        if "logprobs" in doc:
            raise ModelFormatError("bpe model must not carry a 'logprobs' payload")
        merges_raw = doc.get("merges")
        vocab_raw = doc.get("vocab")
        if not isinstance(merges_raw, list) or not isinstance(vocab_raw, list):
            raise ModelFormatError("bpe model needs 'merges' and 'vocab' lists")
        merges = []
        for entry in merges_raw:
            if (
                not isinstance(entry, list)
                or len(entry) != 2
                or not all(isinstance(side, str) and side for side in entry)
            ):
                raise ModelFormatError(f"malformed merge entry: {entry!r}")
            merges.append((entry[0], entry[1]))
        if not all(isinstance(t, str) and t for t in vocab_raw):
            raise ModelFormatError("vocab entries must be non-empty strings")
        try:
            model: BpeModel | UnigramModel = BpeModel(
                tuple(merges), frozenset(vocab_raw), marker, unk_token
            )
        except ValueError as exc:
            raise ModelFormatError(str(exc)) from exc
    else:
        if "merges" in doc or "vocab" in doc:
            raise ModelFormatError("unigram model must not carry a bpe payload")
        logprobs_raw = doc.get("logprobs")
        if not isinstance(logprobs_raw, dict):
            raise ModelFormatError("unigram model needs a 'logprobs' object")
        logprobs = {}
        for token, raw in logprobs_raw.items():
            if not token:
                raise ModelFormatError("empty token in logprobs")
            lp = _parse_float(raw, f"logprob of {token!r}")
            logprobs[token] = lp
        total = sum(math.exp(lp) for lp in sorted(logprobs.values()))
        if abs(total - 1.0) > 1e-9:
            raise ModelFormatError(
                f"token probabilities must sum to 1 within 1e-9, got {total!r}"
            )
        try:
            model = UnigramModel(logprobs, marker, unk_token)
        except ValueError as exc:
            raise ModelFormatError(str(exc)) from exc

    metadata = doc.get("training_metadata", {})
    if not isinstance(metadata, dict):
        raise ModelFormatError("training_metadata must be an object")
    return model, metadata


def canonical_token_ids(model: BpeModel | UnigramModel) -> dict[str, int]:
    """Stable token ids: required tokens first, then the rest, each group
    in lexicographic code-point order."""
    if isinstance(model, BpeModel):
        tokens = set(model.vocab)
        required = {t for t in tokens if len(t) == 1} | {model.unk_token}
    else:
        tokens = set(model.logprobs)
        required = set(model.required_tokens)
    tokens |= {model.unk_token}
    ordered = sorted(required) + sorted(tokens - required)
    return {token: idx for idx, token in enumerate(ordered)}
