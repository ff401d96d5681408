"""Independent brute-force references for the test suite.

Everything here favors obviousness over speed: exhaustive enumeration of
segmentations, full recounting of bigrams, direct re-derivation of
likelihoods. These implementations are the ground truth the fast paths
are checked against and must stay independent of the library internals.
"""

import math
from collections import Counter

from subtok.corpus import WordCounts


def enumerate_segmentations(word: str, vocab) -> list[tuple[str, ...]]:
    """All ways to write ``word`` as a concatenation of vocab tokens."""
    if word == "":
        return [()]
    results = []
    for end in range(1, len(word) + 1):
        prefix = word[:end]
        if prefix in vocab:
            for rest in enumerate_segmentations(word[end:], vocab):
                results.append((prefix,) + rest)
    return results


def oracle_marginal(logprobs: dict[str, float], word: str, unk_token: str = "<unk>") -> float:
    """Log of the exhaustive sum of segmentation probabilities."""
    vocab = set(logprobs) - {unk_token}
    total = 0.0
    for seg in enumerate_segmentations(word, vocab):
        total += math.exp(sum(logprobs[t] for t in seg))
    return math.log(total) if total > 0.0 else float("-inf")


def oracle_viterbi(logprobs: dict[str, float], word: str, unk_token: str = "<unk>"):
    """Exhaustive argmax segmentation under the stated tie-breaks.

    Score sums fold left to right, matching the dynamic program's
    association order, so float ties agree exactly. Ties prefer fewer
    tokens, then the longest token at the earliest differing position.
    """
    vocab = set(logprobs) - {unk_token}
    best = None
    for seg in enumerate_segmentations(word, vocab):
        score = 0.0
        for token in seg:
            score += logprobs[token]
        key = (score, -len(seg), tuple(len(t) for t in seg))
        if best is None or key > best[0]:
            best = (key, seg)
    if best is None:
        return None
    return best[1], best[0][0]


def oracle_corpus_loglik(logprobs: dict[str, float], counts: WordCounts, unk_token: str = "<unk>") -> float:
    return sum(
        freq * oracle_marginal(logprobs, word, unk_token)
        for word, freq in counts.entries.items()
    )


def oracle_token_loss(
    logprobs: dict[str, float], counts: WordCounts, token: str, unk_token: str = "<unk>"
) -> float:
    """Loss of removing ``token``: re-derive both corpus likelihoods.

    The reduced model drops the token and renormalizes the remaining
    probabilities.
    """
    before = oracle_corpus_loglik(logprobs, counts, unk_token)
    kept = {t: math.exp(lp) for t, lp in logprobs.items() if t != token}
    total = sum(kept.values())
    reduced = {t: math.log(p / total) for t, p in kept.items()}
    after = oracle_corpus_loglik(reduced, counts, unk_token)
    return before - after


def oracle_train_bpe(counts: WordCounts, k: int):
    """Naive BPE trainer: full bigram recount every round.

    Returns (merges, final word symbol lists keyed by word). Ties break
    lexicographically on the (left, right) pair; pairs whose product
    already is a token (or the reserved unknown string) are skipped; the
    loop stops when no pair occurs at least twice.
    """
    words = {word: list(word) for word in counts.entries}
    vocab = set()
    for word in counts.entries:
        vocab.update(word)
    merges = []
    while len(vocab) < k:
        pair_counts: Counter = Counter()
        for word, symbols in words.items():
            freq = counts.entries[word]
            for pair in zip(symbols, symbols[1:]):
                pair_counts[pair] += freq
        candidates = [
            (-count, pair)
            for pair, count in pair_counts.items()
            if count >= 2
            and pair[0] + pair[1] not in vocab
            and pair[0] + pair[1] != "<unk>"
        ]
        if not candidates:
            break
        _, best = min(candidates)
        left, right = best
        for word, symbols in words.items():
            out = []
            i = 0
            while i < len(symbols):
                if i + 1 < len(symbols) and symbols[i] == left and symbols[i + 1] == right:
                    out.append(left + right)
                    i += 2
                else:
                    out.append(symbols[i])
                    i += 1
            words[word] = out
        vocab.add(left + right)
        merges.append(best)
    return merges, words


def oracle_replay_bpe(merges, word: str, vocab, unk_token: str = "<unk>") -> list[str]:
    """Plain in-order merge replay for tokenizer equivalence checks."""
    symbols = [ch if ch in vocab else unk_token for ch in word]
    for left, right in merges:
        out = []
        i = 0
        while i < len(symbols):
            if i + 1 < len(symbols) and symbols[i] == left and symbols[i + 1] == right:
                out.append(left + right)
                i += 2
            else:
                out.append(symbols[i])
                i += 1
        symbols = out
    return symbols
