"""Byte-pair encoding: greedy bigram-merge training and ordered-merge
tokenization.

Training repeatedly fuses the most frequent adjacent token pair into a
new vocabulary token, counting pairs within words (never across word
boundaries) weighted by word frequency. Tokenization replays the stored
merges, in creation order, on new words.
"""

import heapq
from collections import Counter, defaultdict
from dataclasses import dataclass, field

from .corpus import WordCounts, char_inventory
from .errors import EmptyCorpusError, InfeasibleVocabError

UNK_TOKEN = "<unk>"


@dataclass(frozen=True)
class BpeModel:
    """Ordered merge list plus the vocabulary it generates.

    ``vocab`` is exactly the character inventory plus one product per
    merge; each merge side is either a character or the product of an
    earlier merge. The reserved ``unk_token`` is not part of ``vocab``.
    """

    merges: tuple[tuple[str, str], ...]
    vocab: frozenset[str]
    marker: str
    unk_token: str = UNK_TOKEN
    _ranks: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if len(self.marker) != 1:
            raise ValueError("marker must be a single code point")
        known = {t for t in self.vocab if len(t) == 1}
        for left, right in self.merges:
            if left not in known or right not in known:
                raise ValueError(f"merge ({left!r}, {right!r}) references an unknown token")
            product = left + right
            if product in known:
                raise ValueError(f"merge product {product!r} duplicates an existing token")
            known.add(product)
        if known != set(self.vocab):
            raise ValueError("vocab must equal the characters plus the merge products")
        object.__setattr__(self, "_ranks", {pair: i for i, pair in enumerate(self.merges)})

    def tokenize(self, word: str) -> list[str]:
        return tokenize_bpe(self, word)


def train_bpe(counts: WordCounts, k: int) -> BpeModel:
    """Train a BPE vocabulary of ``k`` tokens (characters plus merges).

    Ties between equally frequent bigrams are broken by lexicographic
    code-point order on the (left, right) pair. The loop stops early when
    no bigram occurs at least twice. Candidate pairs whose concatenation
    is already a token (or equals the reserved unknown token) are
    skipped: every merge must add a new vocabulary entry.

    Pair counts are maintained incrementally; only the words containing
    the merged pair are re-examined.
    """
    if not counts.entries:
        raise EmptyCorpusError("cannot train BPE on an empty corpus")
    chars = char_inventory(counts).chars
    if k < len(chars):
        raise InfeasibleVocabError(
            f"vocab size {k} is smaller than the character inventory ({len(chars)})"
        )

    words: list[list[str]] = []
    freqs: list[int] = []
    for word in sorted(counts.entries):
        words.append(list(word))
        freqs.append(counts.entries[word])

    pair_counts: Counter = Counter()
    pair_words: defaultdict[tuple[str, str], set[int]] = defaultdict(set)
    for idx, symbols in enumerate(words):
        freq = freqs[idx]
        for pair in zip(symbols, symbols[1:]):
            pair_counts[pair] += freq
            pair_words[pair].add(idx)

    # Lazy max-heap: stale entries are discarded on pop, so the first
    # entry matching the live count is the current maximum. Heap order
    # (-count, pair) realizes the lexicographic tie-break directly.
    heap = [(-c, pair) for pair, c in pair_counts.items()]
    heapq.heapify(heap)

    vocab = set(chars)
    merges: list[tuple[str, str]] = []
    banned: set[tuple[str, str]] = set()

    while len(vocab) < k:
        best = None
        while heap:
            neg_count, pair = heapq.heappop(heap)
            if pair_counts.get(pair, 0) != -neg_count:
                continue  # stale
            if -neg_count < 2:
                break
            if pair in banned:
                continue
            if pair[0] + pair[1] in vocab or pair[0] + pair[1] == UNK_TOKEN:
                banned.add(pair)
                continue
            best = pair
            break
        if best is None:
            break

        left, right = best
        product = left + right
        for idx in pair_words[best].copy():
            symbols = words[idx]
            if best not in zip(symbols, symbols[1:]):
                pair_words[best].discard(idx)
                continue
            freq = freqs[idx]
            new_symbols = _apply_merge(symbols, left, right)
            delta = Counter(zip(new_symbols, new_symbols[1:]))
            delta.subtract(Counter(zip(symbols, symbols[1:])))
            for pair, d in delta.items():
                if d == 0:
                    continue
                pair_counts[pair] += d * freq
                if pair_counts[pair] <= 0:
                    del pair_counts[pair]
                else:
                    heapq.heappush(heap, (-pair_counts[pair], pair))
                if d > 0:
                    pair_words[pair].add(idx)
            words[idx] = new_symbols
        vocab.add(product)
        merges.append(best)

    return BpeModel(tuple(merges), frozenset(vocab), counts.marker)


def tokenize_bpe(model: BpeModel, word: str) -> list[str]:
    """Tokenize a marker-prefixed word by replaying the stored merges.

    Characters absent from the vocabulary are replaced by the reserved
    unknown token before merging. Applying the lowest-indexed applicable
    merge until none applies equals replaying every merge in stored
    order: a merge product is always a new token, so applying a merge can
    never create an adjacency that an earlier merge would have consumed.
    """
    if not word or word[0] != model.marker:
        raise ValueError("word must start with the model marker")
    vocab = model.vocab
    symbols = [ch if ch in vocab else model.unk_token for ch in word]
    ranks = model._ranks
    while len(symbols) > 1:
        best_rank = None
        for pair in zip(symbols, symbols[1:]):
            rank = ranks.get(pair)
            if rank is not None and (best_rank is None or rank < best_rank):
                best_rank = rank
        if best_rank is None:
            break
        left, right = model.merges[best_rank]
        symbols = _apply_merge(symbols, left, right)
    return symbols


def _apply_merge(symbols: list[str], left: str, right: str) -> list[str]:
    """Replace adjacent (left, right) occurrences, leftmost first,
    non-overlapping."""
    out: list[str] = []
    i = 0
    n = len(symbols)
    while i < n:
        if i + 1 < n and symbols[i] == left and symbols[i + 1] == right:
            out.append(left + right)
            i += 2
        else:
            out.append(symbols[i])
            i += 1
    return out
