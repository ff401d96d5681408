#!/usr/bin/env python3
"""Generate the bundled desk-scale corpus and morphological references.

Produces tests/data/desk_corpus.txt.gz (~1 MB of English-like text with
productive derivational morphology) and tests/data/desk_references.tsv
(~500 multimorphemic words with corpus frequencies and morph splits).

The generator is deterministic: only Random.random() is used, so the
committed data can be reproduced byte for byte.

Usage: python scripts/generate_desk_data.py [out_dir]
"""

import bisect
import gzip
import os
import random
import sys
from collections import Counter

SEED = 20260808
TARGET_BYTES = 1_100_000
N_REFERENCES = 500

FUNCTION_WORDS = [
    "the", "of", "and", "to", "a", "in", "that", "is", "was", "for",
    "it", "with", "as", "on", "be", "at", "by", "this", "had", "not",
    "are", "but", "from", "or", "have", "an", "they", "which", "one", "were",
    "her", "all", "she", "there", "would", "their", "we", "him", "been", "has",
    "when", "who", "will", "no", "more", "if", "out", "so", "said", "what",
]

REAL_STEMS = [
    "friend", "work", "play", "nation", "form", "port", "struct", "act",
    "read", "write", "walk", "talk", "turn", "help", "hope", "care",
    "use", "move", "call", "look", "want", "need", "seem", "feel",
    "think", "know", "take", "make", "come", "give", "find", "tell",
    "place", "point", "world", "school", "state", "family", "student", "group",
    "country", "problem", "hand", "part", "child", "eye", "woman", "life",
    "man", "day", "time", "year", "way", "thing", "word", "number",
    "water", "sound", "light", "house", "picture", "animal", "mother", "father",
    "letter", "order", "question", "answer", "story", "example", "paper", "music",
    "river", "field", "force", "test", "heat", "wonder", "laugh", "thousand",
    "power", "trust", "dream", "plan", "heart", "mind", "voice", "face",
    "press", "touch", "build", "break", "carry", "clean", "clear", "close",
    "count", "cover", "cross", "dance", "doubt", "dress", "drive", "drop",
    "grace", "guard", "guide", "judge", "learn", "limit", "march", "match",
    "offer", "paint", "pause", "phase", "pitch", "price", "print", "prove",
]

ONSETS = ["b", "c", "d", "f", "g", "h", "j", "k", "l", "m", "n", "p",
          "r", "s", "t", "v", "w", "bl", "br", "ch", "cl", "cr", "dr",
          "fl", "fr", "gl", "gr", "pl", "pr", "sc", "sh", "sk", "sl",
          "sm", "sn", "sp", "st", "sw", "th", "tr", "tw"]
VOWELS = ["a", "e", "i", "o", "u", "ai", "ea", "ee", "oa", "oo", "ou"]
CODAS = ["b", "ck", "d", "ff", "g", "k", "l", "ll", "m", "n", "nd",
         "ng", "nk", "nt", "p", "r", "rd", "rm", "rn", "rt", "s",
         "sh", "sk", "sp", "ss", "st", "t", "th", "x"]

PREFIXES = ["un", "re", "pre", "dis", "over", "out", "non", "de", "mis", "sub"]
SUFFIXES = ["s", "ed", "ing", "ly", "er", "est", "ness", "ment", "ion",
            "able", "ful", "less", "ish", "y", "en", "ive", "al", "ous"]

PUNCT = [".", ",", ";", "!", "?"]


def pick(rng: random.Random, items):
    return items[int(rng.random() * len(items))]


def zipf_cumweights(n: int, s: float = 1.0, shift: float = 8.0) -> list[float]:
    """Cumulative Zipf weights: P(rank r) proportional to 1/(r+shift)^s."""
    acc = 0.0
    cum = []
    for r in range(n):
        acc += 1.0 / (r + shift) ** s
        cum.append(acc)
    return cum


def zipf_index(rng: random.Random, cum: list[float]) -> int:
    return bisect.bisect_left(cum, rng.random() * cum[-1])


def make_stems(rng: random.Random) -> list[str]:
    stems = list(REAL_STEMS)
    seen = set(stems)
    while len(stems) < 1000:
        stem = pick(rng, ONSETS) + pick(rng, VOWELS) + pick(rng, CODAS)
        if rng.random() < 0.25:
            stem += pick(rng, VOWELS) + pick(rng, CODAS)
        if stem not in seen and len(stem) >= 3:
            seen.add(stem)
            stems.append(stem)
    return stems


def make_lexicon(rng: random.Random, stems: list[str]):
    """Derived forms with morph decompositions.

    Returns a list of (word, morphs) with the monomorphemic stems first
    and derived (multimorphemic) forms attached to each stem. The type
    space deliberately dwarfs desk-scale vocabulary sizes so tokenizers
    must compose most words from pieces.
    """
    lexicon: list[tuple[str, tuple[str, ...]]] = []
    seen: set[str] = set()

    def add(word: str, morphs: tuple[str, ...]):
        if word not in seen:
            seen.add(word)
            lexicon.append((word, morphs))

    for word in FUNCTION_WORDS:
        add(word, (word,))
    for stem in stems:
        add(stem, (stem,))
        n_forms = 8 + int(rng.random() * 14)
        for _ in range(n_forms):
            morphs = [stem]
            if rng.random() < 0.35:
                morphs.insert(0, pick(rng, PREFIXES))
            n_suffix = 1 if rng.random() < 0.7 else 2
            if len(morphs) > 1 and rng.random() < 0.35:
                n_suffix = 0  # prefix-only derivation
            for _ in range(n_suffix):
                suffix = pick(rng, SUFFIXES)
                if morphs[-1].endswith(suffix):
                    continue
                morphs.append(suffix)
            if len(morphs) == 1:
                continue
            add("".join(morphs), tuple(morphs))
    return lexicon


def main(out_dir: str) -> None:
    rng = random.Random(SEED)
    stems = make_stems(rng)
    lexicon = make_lexicon(rng, stems)

    # Zipf distribution over the lexicon: function words hold the head
    # ranks, each stem precedes its derived forms.
    cum = zipf_cumweights(len(lexicon))

    corpus_counts: Counter = Counter()
    lines = []
    total_bytes = 0
    while total_bytes < TARGET_BYTES:
        n_words = 8 + int(rng.random() * 7)
        words = []
        for _ in range(n_words):
            idx = zipf_index(rng, cum)
            word, _ = lexicon[idx]
            corpus_counts[word] += 1
            if rng.random() < 0.04:
                word = word[0].upper() + word[1:]
            if rng.random() < 0.12:
                word = word + pick(rng, PUNCT)
            words.append(word)
        line = " ".join(words)
        lines.append(line)
        total_bytes += len(line.encode("utf-8")) + 1

    corpus_text = "\n".join(lines) + "\n"

    # References: multimorphemic forms sampled across the frequency
    # range (an even stride over the count-sorted candidates), weighted
    # by their corpus frequency.
    multi = [
        (word, morphs)
        for word, morphs in lexicon
        if len(morphs) >= 2 and corpus_counts[word] >= 2
    ]
    multi.sort(key=lambda item: (-corpus_counts[item[0]], item[0]))
    stride = max(1, len(multi) // N_REFERENCES)
    sampled = multi[::stride][:N_REFERENCES]
    references = [(word, corpus_counts[word], morphs) for word, morphs in sampled]

    os.makedirs(out_dir, exist_ok=True)
    corpus_path = os.path.join(out_dir, "desk_corpus.txt.gz")
    # Fixed mtime + no filename keep the archive byte-stable.
    with gzip.GzipFile(corpus_path, "wb", mtime=0) as fh:
        fh.write(corpus_text.encode("utf-8"))
    refs_path = os.path.join(out_dir, "desk_references.tsv")
    with open(refs_path, "w", encoding="utf-8") as fh:
        for word, weight, morphs in references:
            fh.write(f"{word}\t{weight}\t{'|'.join(morphs)}\n")

    print(f"wrote {corpus_path} ({total_bytes} bytes uncompressed, {len(lines)} lines)")
    print(f"wrote {refs_path} ({len(references)} references)")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "tests/data")
