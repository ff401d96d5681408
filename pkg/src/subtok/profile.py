"""Vocabulary and corpus comparison statistics.

Profiles answer how a trained vocabulary is spent: the token length
distribution, the rank-frequency curve over the corpus, the count of
"dead zone" tokens that almost never surface, and the mean tokens per
word. A second report ranks tokens by how differently two tokenizers use
them on the same corpus.
"""

import statistics
from collections import Counter
from dataclasses import dataclass

from .bpe import BpeModel
from .corpus import WordCounts
from .unigram import UnigramModel

DEAD_ZONE_DIVISOR = 100.0


@dataclass(frozen=True)
class VocabProfile:
    """Vocabulary statistics for one tokenizer over one corpus.

    The reserved unknown token is excluded from the vocabulary statistics
    (it is not a surface type); emitted unknown tokens still count toward
    tokens per word.
    """

    vocab_size: int
    length_histogram: dict[int, int]
    mean_token_length: float
    rank_frequency: list[tuple[str, int]]
    dead_zone_count: int
    dead_zone_threshold: float
    tokens_per_word: float
    tokens_per_word_type: float


@dataclass(frozen=True)
class FrequencyDiffReport:
    """Tokens ranked by cross-tokenizer frequency difference.

    ``rows`` holds (token, freq_a, freq_b, freq_a - freq_b), sorted by
    absolute difference descending.
    """

    rows: list[tuple[str, int, int, int]]


def _surface_vocab(model: BpeModel | UnigramModel) -> set[str]:
    if isinstance(model, BpeModel):
        return set(model.vocab)
    return set(model.logprobs) - {model.unk_token}


def _token_frequencies(model, counts: WordCounts) -> tuple[Counter, int, int]:
    """Corpus token frequencies under the model's tokenization.

    Word types are tokenized once and weighted by their counts. Returns
    (frequencies, weighted token total, per-type token total).
    """
    freqs: Counter[str] = Counter()
    weighted_tokens = 0
    type_tokens = 0
    for word, count in counts.entries.items():
        tokens = model.tokenize(word)
        type_tokens += len(tokens)
        weighted_tokens += count * len(tokens)
        for token in tokens:
            freqs[token] += count
    return freqs, weighted_tokens, type_tokens


def profile_vocab(
    model: BpeModel | UnigramModel,
    counts: WordCounts,
    dead_zone_divisor: float = DEAD_ZONE_DIVISOR,
) -> VocabProfile:
    """Profile a model's vocabulary against a corpus.

    ``dead_zone_count`` is the number of vocabulary tokens whose corpus
    frequency falls below max(1, median token frequency / divisor).
    """
    vocab = _surface_vocab(model)
    freqs, weighted_tokens, type_tokens = _token_frequencies(model, counts)

    histogram: dict[int, int] = {}
    for token in vocab:
        histogram[len(token)] = histogram.get(len(token), 0) + 1
    mean_len = sum(len(t) for t in vocab) / len(vocab) if vocab else 0.0

    vocab_freqs = [(token, freqs.get(token, 0)) for token in vocab]
    vocab_freqs.sort(key=lambda item: (-item[1], item[0]))

    if vocab_freqs:
        median_freq = statistics.median(f for _, f in vocab_freqs)
        threshold = max(1.0, median_freq / dead_zone_divisor)
        dead = sum(1 for _, f in vocab_freqs if f < threshold)
    else:
        threshold = 1.0
        dead = 0

    total_words = counts.total_words
    total_types = counts.total_word_types
    return VocabProfile(
        vocab_size=len(vocab),
        length_histogram=dict(sorted(histogram.items())),
        mean_token_length=mean_len,
        rank_frequency=vocab_freqs,
        dead_zone_count=dead,
        dead_zone_threshold=threshold,
        tokens_per_word=weighted_tokens / total_words if total_words else 0.0,
        tokens_per_word_type=type_tokens / total_types if total_types else 0.0,
    )


def frequency_diff(
    model_a: BpeModel | UnigramModel,
    model_b: BpeModel | UnigramModel,
    counts: WordCounts,
    top_n: int | None = None,
) -> FrequencyDiffReport:
    """Rank tokens by how differently two tokenizers use them.

    Frequencies are occurrence counts of each token in the full-corpus
    tokenization under each model (word types weighted by counts). Rows
    cover the union of tokens either tokenizer emits, sorted by absolute
    difference descending; positive differences mean the token is more
    frequent under model A.
    """
    freqs_a, _, _ = _token_frequencies(model_a, counts)
    freqs_b, _, _ = _token_frequencies(model_b, counts)
    rows = [
        (token, freqs_a.get(token, 0), freqs_b.get(token, 0))
        for token in set(freqs_a) | set(freqs_b)
    ]
    ranked = sorted(
        ((t, fa, fb, fa - fb) for t, fa, fb in rows),
        key=lambda row: (-abs(row[3]), row[0]),
    )
    if top_n is not None:
        ranked = ranked[:top_n]
    return FrequencyDiffReport(ranked)
