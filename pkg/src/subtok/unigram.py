"""Unigram language-model tokenization.

A vocabulary is seeded with frequent substrings, fitted by EM over the
segmentation lattice, and iteratively pruned by removing the tokens
whose removal costs the least corpus likelihood, until the target size
is reached. Tokenization decodes the maximum-likelihood segmentation by
Viterbi dynamic programming.
"""

import logging
import math
from collections import Counter, defaultdict
from dataclasses import dataclass

import numpy as np

from .corpus import WordCounts, char_inventory
from .errors import EmptyCorpusError, InfeasibleVocabError

logger = logging.getLogger(__name__)

UNK_TOKEN = "<unk>"
DEFAULT_ALPHA = 0.25
DEFAULT_EM_ITERS = 2
DEFAULT_MAX_TOKEN_LEN = 16
SEED_SIZE_FACTOR = 100  # default seed cap = factor * target vocab size
EXPECTED_COUNT_FLOOR = 1e-10

# Removal losses: the corpus-wide renormalization term is evaluated by a
# truncated cumulant series when the removed probability mass is small
# (truncation error far below float64 noise), and exactly otherwise.
_SERIES_MAX_LOG_SCALE = 1e-3
_SERIES_TERMS = 12
_FACTORIALS = [math.factorial(m) for m in range(_SERIES_TERMS + 1)]


@dataclass(frozen=True)
class UnigramModel:
    """Token -> log-probability table defining a distribution over
    segmentations.

    Probabilities sum to one; every log probability is finite and
    negative. All single-character tokens plus the reserved unknown token
    are required (they keep every string segmentable and are never
    pruned).
    """

    logprobs: dict[str, float]
    marker: str
    unk_token: str = UNK_TOKEN

    def __post_init__(self):
        if len(self.marker) != 1:
            raise ValueError("marker must be a single code point")
        if self.unk_token not in self.logprobs:
            raise ValueError(f"reserved token {self.unk_token!r} missing from the model")
        total = 0.0
        max_len = 0
        for token, lp in self.logprobs.items():
            if not token:
                raise ValueError("empty token in model")
            if math.isnan(lp) or math.isinf(lp) or lp >= 0.0:
                raise ValueError(f"log probability for {token!r} must be finite and < 0")
            total += math.exp(lp)
            if len(token) > max_len:
                max_len = len(token)
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"token probabilities must sum to 1, got {total!r}")
        object.__setattr__(self, "_max_token_len", max_len)

    @property
    def required_tokens(self) -> frozenset[str]:
        return frozenset(t for t in self.logprobs if len(t) == 1) | {self.unk_token}

    def tokenize(self, word: str) -> tuple[str, ...]:
        return viterbi_tokenize(self, word).tokens

    @classmethod
    def from_probs(
        cls,
        probs: dict[str, float],
        marker: str,
        unk_token: str = UNK_TOKEN,
        unk_prob: float = 1e-12,
    ) -> "UnigramModel":
        """Build a model from (not necessarily normalized) probabilities.

        The reserved unknown token is added with a negligible probability
        if absent, then everything is renormalized.
        """
        weights = dict(probs)
        if unk_token not in weights:
            weights[unk_token] = unk_prob * sum(probs.values())
        total = sum(weights.values())
        logprobs = {t: math.log(w / total) for t, w in weights.items()}
        return cls(logprobs, marker, unk_token)


@dataclass(frozen=True)
class Segmentation:
    """Ordered token list whose concatenation reconstructs the word.

    ``log_likelihood`` is the sum of the token log probabilities. When
    unknown characters were replaced by the reserved unknown token, the
    concatenation property holds up to those substitutions.
    """

    tokens: tuple[str, ...]
    log_likelihood: float


@dataclass(frozen=True)
class LossTable:
    """Per-token corpus-likelihood loss of removing the token.

    ``protected`` tokens (single characters and the reserved unknown
    token) are never scored and never pruned.
    """

    losses: dict[str, float]
    protected: frozenset[str]


def seed_vocab(
    counts: WordCounts,
    max_seed: int,
    max_token_len: int = DEFAULT_MAX_TOKEN_LEN,
) -> UnigramModel:
    """Initial vocabulary: frequent within-word substrings.

    Candidates are all substrings of words (length <= ``max_token_len``)
    whose frequency-weighted occurrence count is at least 2, capped to
    the ``max_seed`` highest-count candidates. Single characters are
    always kept regardless of count. Initial probabilities are
    proportional to the substring counts.
    """
    if not counts.entries:
        raise EmptyCorpusError("cannot seed a vocabulary from an empty corpus")
    substr_counts: Counter[str] = Counter()
    for word, freq in counts.entries.items():
        n = len(word)
        for i in range(n):
            upper = min(n, i + max_token_len)
            for j in range(i + 1, upper + 1):
                substr_counts[word[i:j]] += freq

    chars = {t: c for t, c in substr_counts.items() if len(t) == 1}
    if max_seed < len(chars):
        raise InfeasibleVocabError(
            f"max_seed {max_seed} is smaller than the character inventory ({len(chars)})"
        )
    multi = [
        (t, c)
        for t, c in substr_counts.items()
        if len(t) > 1 and c >= 2 and t != UNK_TOKEN
    ]
    multi.sort(key=lambda item: (-item[1], item[0]))

    weights = dict(chars)
    for token, count in multi[: max_seed - len(chars)]:
        weights[token] = count
    weights[UNK_TOKEN] = EXPECTED_COUNT_FLOOR
    total = float(sum(weights.values()))
    logprobs = {t: math.log(w / total) for t, w in weights.items()}
    return UnigramModel(logprobs, counts.marker)


def _logsumexp(values: list[float]) -> float:
    m = max(values)
    if m == float("-inf"):
        return m
    return m + math.log(sum(math.exp(v - m) for v in values))


def marginal_loglik(model: UnigramModel, word: str) -> float:
    """Log of the summed probability of every segmentation of ``word``.

    Computed by a forward pass over the segmentation lattice in log
    space. Returns ``-inf`` if the word cannot be segmented with the
    model's tokens (impossible while every character is retained).
    """
    if not word:
        raise ValueError("word must be non-empty")
    lp = model.logprobs
    unk = model.unk_token
    max_len = model._max_token_len
    n = len(word)
    alpha = [float("-inf")] * (n + 1)
    alpha[0] = 0.0
    for j in range(1, n + 1):
        incoming = []
        for i in range(max(0, j - max_len), j):
            if alpha[i] == float("-inf"):
                continue
            token = word[i:j]
            if token == unk:
                continue
            v = lp.get(token)
            if v is not None:
                incoming.append(alpha[i] + v)
        if incoming:
            alpha[j] = _logsumexp(incoming)
    return alpha[n]


def corpus_loglik(model: UnigramModel, counts: WordCounts) -> float:
    """Corpus log-likelihood: count-weighted sum of word marginals."""
    return sum(
        freq * marginal_loglik(model, word) for word, freq in counts.entries.items()
    )


def viterbi_tokenize(model: UnigramModel, word: str) -> Segmentation:
    """Maximum-likelihood segmentation of ``word``.

    Ties are broken by fewer tokens, then by the longest token at the
    earliest position where the candidates differ. Unknown characters are
    emitted as the reserved unknown token at its (penalty) log
    probability.
    """
    if not word:
        raise ValueError("word must be non-empty")
    lp = model.logprobs
    unk = model.unk_token
    unk_lp = lp[unk]
    max_len = model._max_token_len
    n = len(word)
    # State per position: (score, -token_count, token_length_tuple); the
    # tuple comparison realizes the tie-break order exactly.
    best: list[tuple[float, int, tuple[int, ...]] | None] = [None] * (n + 1)
    best[0] = (0.0, 0, ())
    for j in range(1, n + 1):
        top = None
        for i in range(max(0, j - max_len), j):
            state = best[i]
            if state is None:
                continue
            token = word[i:j]
            if token == unk:
                continue
            v = lp.get(token)
            if v is None:
                continue
            cand = (state[0] + v, state[1] - 1, state[2] + (j - i,))
            if top is None or cand > top:
                top = cand
        if word[j - 1] not in lp and best[j - 1] is not None:
            state = best[j - 1]
            cand = (state[0] + unk_lp, state[1] - 1, state[2] + (1,))
            if top is None or cand > top:
                top = cand
        best[j] = top
    final = best[n]
    if final is None:
        raise ValueError(f"word {word!r} cannot be segmented with this model")
    tokens = []
    pos = 0
    for length in final[2]:
        piece = word[pos : pos + length]
        tokens.append(piece if piece in lp and piece != unk else unk)
        pos += length
    return Segmentation(tuple(tokens), final[0])


class _Lattice:
    """Segmentation-lattice machinery over a fixed token universe.

    Built once per corpus/vocabulary pair; supports E-steps, corpus
    likelihood, and exact removal losses. Tokens that were pruned are
    represented by ``-inf`` log probabilities, so one lattice serves a
    whole training run. Words and tokens are processed in sorted order
    and every reduction runs in a fixed sequence, keeping results
    reproducible bit for bit.
    """

    def __init__(self, counts: WordCounts, tokens, unk_token: str = UNK_TOKEN):
        self.tokens: list[str] = sorted(set(tokens) - {unk_token})
        self.token_ids = {t: i for i, t in enumerate(self.tokens)}
        max_len = max(len(t) for t in self.tokens)
        self.max_positions = max((len(w) for w in counts.entries), default=0) + 2
        self.words: list[tuple[str, int]] = []
        self.word_edges: list[list[tuple[int, int, int]]] = []
        self.token_occurrences: defaultdict[int, list[tuple[int, int, int]]] = defaultdict(list)
        for word in sorted(counts.entries):
            freq = counts.entries[word]
            edges = []
            for j in range(1, len(word) + 1):
                for i in range(max(0, j - max_len), j):
                    tid = self.token_ids.get(word[i:j])
                    if tid is not None:
                        edges.append((i, j, tid))
            widx = len(self.words)
            self.words.append((word, freq))
            self.word_edges.append(edges)
            for i, j, tid in edges:
                self.token_occurrences[tid].append((widx, i, j))

    def retire_tokens(self, tids) -> None:
        """Drop the given tokens' edges from every word lattice.

        One-way: used by the trainer after each pruning round so later
        passes only walk the surviving edges.
        """
        dead = set(tids)
        if not dead:
            return
        for widx, edges in enumerate(self.word_edges):
            if any(tid in dead for _, _, tid in edges):
                self.word_edges[widx] = [e for e in edges if e[2] not in dead]

    def _position_bests(self, lp: list[float], widx: int) -> tuple[list[float], list[float]]:
        """Best prefix and suffix path log-likelihood per lattice position.

        These anchor the linear-space passes: rescaling every edge by
        exp(fbest[i] + lp - fbest[j]) bounds all forward weights at 1, so
        sums stay in [1, #paths] no matter how skewed the model is.
        """
        word, _ = self.words[widx]
        n = len(word)
        edges = self.word_edges[widx]
        neg_inf = float("-inf")
        fbest = [neg_inf] * (n + 1)
        fbest[0] = 0.0
        for i, j, tid in edges:
            v = fbest[i] + lp[tid]
            if v > fbest[j]:
                fbest[j] = v
        bbest = [neg_inf] * (n + 1)
        bbest[n] = 0.0
        for eidx in range(len(edges) - 1, -1, -1):
            i, j, tid = edges[eidx]
            v = bbest[j] + lp[tid]
            if v > bbest[i]:
                bbest[i] = v
        return fbest, bbest

    def e_step(self, logp: np.ndarray) -> tuple[float, np.ndarray]:
        """One expectation pass.

        Returns the corpus log-likelihood under ``logp`` and the
        count-weighted expected token counts. Unsegmentable words
        contribute ``-inf`` likelihood and no counts.
        """
        lp = logp.tolist()
        counts_list = [0.0] * len(self.tokens)
        loglik = 0.0
        neg_inf = float("-inf")
        exp = math.exp
        for widx, (word, freq) in enumerate(self.words):
            n = len(word)
            fbest, bbest = self._position_bests(lp, widx)
            anchor = fbest[n]
            if anchor == neg_inf:
                loglik = neg_inf
                continue
            live = []
            for i, j, tid in self.word_edges[widx]:
                v = lp[tid]
                if v != neg_inf and fbest[i] != neg_inf:
                    live.append((i, j, tid, v))
            alpha = [0.0] * (n + 1)
            alpha[0] = 1.0
            for i, j, tid, v in live:
                alpha[j] += alpha[i] * exp(fbest[i] + v - fbest[j])
            z = alpha[n]
            beta = [0.0] * (n + 1)
            beta[n] = 1.0
            for eidx in range(len(live) - 1, -1, -1):
                i, j, tid, v = live[eidx]
                if bbest[j] != neg_inf:
                    beta[i] += exp(bbest[j] + v - bbest[i]) * beta[j]
            ratio = freq / z
            for i, j, tid, v in live:
                through = fbest[i] + v + bbest[j]
                if through != neg_inf:
                    counts_list[tid] += alpha[i] * beta[j] * exp(through - anchor) * ratio
            loglik += freq * (math.log(z) + anchor)
        return loglik, np.asarray(counts_list)

    def corpus_loglik(self, logp: np.ndarray) -> float:
        lp = logp.tolist()
        total = 0.0
        neg_inf = float("-inf")
        for widx, (word, freq) in enumerate(self.words):
            n = len(word)
            fbest, _ = self._position_bests(lp, widx)
            if fbest[n] == neg_inf:
                return neg_inf
            alpha = [0.0] * (n + 1)
            alpha[0] = 1.0
            for i, j, tid in self.word_edges[widx]:
                prefix = fbest[i] + lp[tid]
                if prefix == neg_inf:
                    continue
                alpha[j] += alpha[i] * math.exp(prefix - fbest[j])
            total += freq * (math.log(alpha[n]) + fbest[n])
        return total

    def removal_losses(self, logp: np.ndarray, scored: list[int]) -> dict[int, float]:
        """Exact corpus-likelihood loss of removing each scored token.

        For token t with probability p, the model without t renormalizes
        every remaining probability by 1/(1-p). Per word, the likelihood
        under the reduced model is a lattice sum over segmentations that
        avoid t, with every edge weight multiplied by 1/(1-p); that
        factor also changes the likelihood of words not containing t at
        all. The corpus-wide factor term is

            sum_w c_w [log Q_w(kappa) - log Q_w(1)],  kappa = 1/(1-p),

        where Q_w(x) carries x once per token of a segmentation. It is
        evaluated through the cumulants of the segment-count distribution
        (numerically exact for small p) or directly from the per-word
        length polynomials. The avoidance term per affected word comes
        from forward/backward polynomials, with a direct lattice pass
        when the token occurs more than once or the subtraction would
        cancel.
        """
        lp = logp.tolist()
        probs = np.exp(logp)
        neg_inf = float("-inf")

        # Per-word prep: anchored live edges and segment-count
        # polynomials. Forward/backward polynomials per position let the
        # per-token avoidance sums run in O(degree): the paths through
        # one edge (i, j) are F_i(kappa) * kappa*w * B_j(kappa).
        word_live: list[list[tuple[int, int, int, float]] | None] = [None] * len(self.words)
        word_anchors: list[float] = [0.0] * len(self.words)
        word_fbest: list[list[float] | None] = [None] * len(self.words)
        word_poly_f: list[list[list[float]] | None] = [None] * len(self.words)
        word_poly_b: list[list[list[float]] | None] = [None] * len(self.words)
        word_counts_arr = []
        poly_rows = []
        max_degree = 1
        for widx, (word, freq) in enumerate(self.words):
            n = len(word)
            fbest, _ = self._position_bests(lp, widx)
            anchor = fbest[n]
            if anchor == neg_inf:
                poly_rows.append([1.0])
                word_counts_arr.append(0.0)
                continue
            live = []
            for i, j, tid in self.word_edges[widx]:
                prefix = fbest[i] + lp[tid]
                if prefix != neg_inf:
                    live.append((i, j, tid, math.exp(prefix - fbest[j])))
            word_live[widx] = live
            word_anchors[widx] = anchor
            word_fbest[widx] = fbest
            poly_f: list[list[float]] = [[] for _ in range(n + 1)]
            poly_f[0] = [1.0]
            for i, j, tid, w in live:
                src = poly_f[i]
                if not src:
                    continue
                dst = poly_f[j]
                while len(dst) < len(src) + 1:
                    dst.append(0.0)
                for deg, coef in enumerate(src):
                    dst[deg + 1] += coef * w
            poly_b: list[list[float]] = [[] for _ in range(n + 1)]
            poly_b[n] = [1.0]
            for eidx in range(len(live) - 1, -1, -1):
                i, j, tid, w = live[eidx]
                src = poly_b[j]
                if not src:
                    continue
                dst = poly_b[i]
                while len(dst) < len(src) + 1:
                    dst.append(0.0)
                for deg, coef in enumerate(src):
                    dst[deg + 1] += coef * w
            word_poly_f[widx] = poly_f
            word_poly_b[widx] = poly_b
            q = poly_f[n]
            total = sum(q)
            normalized = [c / total for c in q]
            poly_rows.append(normalized)
            word_counts_arr.append(float(freq))
            if len(normalized) > max_degree:
                max_degree = len(normalized)

        counts_vec = np.asarray(word_counts_arr)
        poly_matrix = np.zeros((len(self.words), max_degree))
        for widx, row in enumerate(poly_rows):
            poly_matrix[widx, : len(row)] = row
        degrees = np.arange(max_degree)

        # Cumulants of the segment-count distributions, vectorized across
        # words, then count-weighted into corpus-level series terms.
        powmat = np.ones((max_degree, _SERIES_TERMS + 1))
        for m in range(1, _SERIES_TERMS + 1):
            powmat[:, m] = powmat[:, m - 1] * degrees
        moments = poly_matrix @ powmat
        kum = np.zeros_like(moments)
        for m in range(1, _SERIES_TERMS + 1):
            acc = moments[:, m].copy()
            for j in range(1, m):
                acc -= math.comb(m - 1, j - 1) * kum[:, j] * moments[:, m - j]
            kum[:, m] = acc
        cumulant_totals = [0.0] * (_SERIES_TERMS + 1)
        for m in range(1, _SERIES_TERMS + 1):
            cumulant_totals[m] = float(counts_vec @ kum[:, m])

        losses: dict[int, float] = {}
        for tid in scored:
            p = probs[tid]
            if p >= 1.0:
                raise ValueError("cannot remove a token with probability 1")
            kappa = 1.0 / (1.0 - p)
            log_kappa = -math.log1p(-p)
            if log_kappa <= _SERIES_MAX_LOG_SCALE:
                delta_h = 0.0
                term = 1.0
                for m in range(1, _SERIES_TERMS + 1):
                    term *= log_kappa
                    delta_h += cumulant_totals[m] * term / _FACTORIALS[m]
            else:
                kappa_powers = kappa**degrees
                delta_h = float(counts_vec @ np.log(poly_matrix @ kappa_powers))
            powers = [1.0] * self.max_positions
            acc = 1.0
            for d in range(1, self.max_positions):
                acc *= kappa
                powers[d] = acc

            local = 0.0
            occ_edges: dict[int, list[tuple[int, int]]] = {}
            for widx, i, j in self.token_occurrences.get(tid, ()):
                occ_edges.setdefault(widx, []).append((i, j))
            for widx in sorted(occ_edges):
                poly_f = word_poly_f[widx]
                if poly_f is None:
                    continue
                word, freq = self.words[widx]
                n = len(word)
                q_full = 0.0
                for deg, coef in enumerate(poly_f[n]):
                    q_full += coef * powers[deg]
                avoided = None
                spans = occ_edges[widx]
                if len(spans) == 1:
                    # Single occurrence: subtract the through-paths.
                    i, j = spans[0]
                    fbest = word_fbest[widx]
                    w_edge = math.exp(fbest[i] + lp[tid] - fbest[j])
                    f_i = 0.0
                    for deg, coef in enumerate(poly_f[i]):
                        f_i += coef * powers[deg]
                    b_j = 0.0
                    for deg, coef in enumerate(word_poly_b[widx][j]):
                        b_j += coef * powers[deg]
                    candidate = q_full - f_i * (w_edge * kappa) * b_j
                    if candidate > q_full * 1e-3:
                        avoided = candidate
                if avoided is None:
                    # Multiple occurrences, or the subtraction would
                    # cancel: run the avoidance pass directly.
                    avoid = [0.0] * (n + 1)
                    avoid[0] = 1.0
                    for i, j, etid, w in word_live[widx]:
                        if etid != tid:
                            avoid[j] += avoid[i] * w * kappa
                    avoided = avoid[n]
                if avoided > 1e-250:
                    local += freq * (math.log(q_full) - math.log(avoided))
                else:
                    # Every avoidance path sits far below the word's
                    # anchor; redo the avoidance sum in pure log space.
                    log_q = math.log(q_full) + word_anchors[widx]
                    log_a = self._log_avoid_sum(lp, widx, tid, log_kappa)
                    local += freq * (log_q - log_a)
            losses[tid] = local - delta_h
        return losses

    def _log_avoid_sum(
        self, lp: list[float], widx: int, skip_tid: int, log_kappa: float
    ) -> float:
        """Log path-sum over the lattice avoiding one token, every edge
        weight multiplied by kappa. Pure log-space accumulation; slow but
        immune to scale."""
        word, _ = self.words[widx]
        n = len(word)
        neg_inf = float("-inf")
        alpha = [neg_inf] * (n + 1)
        alpha[0] = 0.0
        for i, j, tid in self.word_edges[widx]:
            if tid == skip_tid or alpha[i] == neg_inf:
                continue
            v = alpha[i] + lp[tid] + log_kappa
            if v == neg_inf:
                continue
            if alpha[j] == neg_inf:
                alpha[j] = v
            elif v > alpha[j]:
                alpha[j] = v + math.log1p(math.exp(alpha[j] - v))
            else:
                alpha[j] = alpha[j] + math.log1p(math.exp(v - alpha[j]))
        return alpha[n]


def _m_step(
    expected: np.ndarray, floor: float = EXPECTED_COUNT_FLOOR
) -> tuple[np.ndarray, float]:
    """Normalize expected counts into log probabilities.

    Counts are clamped at ``floor`` before renormalization (this also
    keeps the never-observed unknown token finite); the unknown token's
    share is returned separately.
    """
    floored = np.maximum(expected, floor)
    total = float(floored.sum()) + floor
    return np.log(floored) - math.log(total), math.log(floor) - math.log(total)


def em_fit(
    model: UnigramModel, counts: WordCounts, iterations: int = DEFAULT_EM_ITERS
) -> UnigramModel:
    """Fit the model to the corpus by expectation-maximization.

    The E-step computes expected token counts per word by
    forward-backward over the segmentation lattice, weighted by word
    counts; the M-step renormalizes them into probabilities. Corpus
    log-likelihood is non-decreasing across iterations.
    """
    if iterations < 1:
        raise ValueError("iterations must be >= 1")
    lattice = _Lattice(counts, model.logprobs, model.unk_token)
    logp = np.array([model.logprobs[t] for t in lattice.tokens])
    unk_lp = model.logprobs[model.unk_token]
    for _ in range(iterations):
        _, expected = lattice.e_step(logp)
        logp, unk_lp = _m_step(expected)
    logprobs = {t: float(logp[i]) for i, t in enumerate(lattice.tokens)}
    logprobs[model.unk_token] = float(unk_lp)
    return UnigramModel(logprobs, model.marker, model.unk_token)


def token_losses(model: UnigramModel, counts: WordCounts) -> LossTable:
    """Corpus-likelihood loss of removing each unprotected token.

    For token t, the loss is the corpus log-likelihood under the model
    minus the corpus log-likelihood under the model with t removed and
    the remaining probabilities renormalized. Single characters and the
    reserved unknown token are protected: never scored, never pruned.
    """
    lattice = _Lattice(counts, model.logprobs, model.unk_token)
    logp = np.array([model.logprobs[t] for t in lattice.tokens])
    protected = model.required_tokens
    scored = [i for i, t in enumerate(lattice.tokens) if t not in protected]
    raw = lattice.removal_losses(logp, scored)
    losses = {lattice.tokens[tid]: loss for tid, loss in raw.items()}
    return LossTable(losses, protected)


def prune(model: UnigramModel, losses: LossTable, k: int, alpha: float) -> UnigramModel:
    """Remove min(|V|-k, floor(alpha*|V|)) of the least useful tokens.

    Tokens whose removal least degrades the corpus likelihood (smallest
    loss) go first; protected tokens are never removed. Remaining
    probabilities are renormalized. Returns the model unchanged when the
    vocabulary is already within ``k``.
    """
    if not 0.0 <= alpha <= 1.0:
        raise ValueError("alpha must be in [0, 1]")
    protected = losses.protected | {model.unk_token}
    n_protected = sum(1 for t in model.logprobs if t in protected)
    if k < n_protected:
        raise InfeasibleVocabError(
            f"vocab size {k} cannot hold the {n_protected} protected tokens"
        )
    size = len(model.logprobs)
    if size <= k:
        return model
    n_remove = min(size - k, math.floor(alpha * size))
    if n_remove == 0:
        return model
    candidates = sorted(
        (loss, token)
        for token, loss in losses.losses.items()
        if token in model.logprobs and token not in protected
    )
    if len(candidates) < n_remove:
        raise InfeasibleVocabError(
            f"cannot remove {n_remove} tokens: only {len(candidates)} are unprotected"
        )
    doomed = {token for _, token in candidates[:n_remove]}
    kept = {t: lp for t, lp in model.logprobs.items() if t not in doomed}
    log_total = _logsumexp(list(kept.values()))
    renormalized = {t: lp - log_total for t, lp in kept.items()}
    return UnigramModel(renormalized, model.marker, model.unk_token)


def train_unigram(
    counts: WordCounts,
    k: int,
    alpha: float = DEFAULT_ALPHA,
    em_iters_per_round: int = DEFAULT_EM_ITERS,
    max_seed: int | None = None,
    max_token_len: int = DEFAULT_MAX_TOKEN_LEN,
) -> UnigramModel:
    """Full training loop: seed, then alternate EM fitting and pruning
    until the vocabulary reaches ``k`` tokens, then fit once more.

    The result has exactly ``k`` tokens whenever the seed vocabulary is
    at least that large (the reserved unknown token counts toward ``k``).
    With a tiny ``alpha`` the removal formula can round to zero; one
    token is then removed per round so that the loop always terminates.
    """
    if not counts.entries:
        raise EmptyCorpusError("cannot train on an empty corpus")
    if not 0.0 <= alpha <= 1.0:
        raise ValueError("alpha must be in [0, 1]")
    n_chars = len(char_inventory(counts))
    if k < n_chars + 1:
        raise InfeasibleVocabError(
            f"vocab size {k} is infeasible: {n_chars} characters plus the unknown "
            f"token need at least {n_chars + 1}"
        )
    if max_seed is None:
        max_seed = SEED_SIZE_FACTOR * k

    model = seed_vocab(counts, max_seed, max_token_len)
    lattice = _Lattice(counts, model.logprobs, model.unk_token)
    tokens = lattice.tokens
    logp = np.array([model.logprobs[t] for t in tokens])
    unk_lp = model.logprobs[model.unk_token]
    alive = np.ones(len(tokens), dtype=bool)
    unprotected = np.array([len(t) > 1 for t in tokens])

    round_no = 0
    while int(alive.sum()) + 1 > k:
        round_no += 1
        loglik = float("nan")
        for _ in range(em_iters_per_round):
            loglik, expected = lattice.e_step(logp)
            masked = np.where(alive, expected, 0.0)
            logp, unk_lp = _m_step_alive(masked, alive)
        size = int(alive.sum()) + 1
        n_remove = min(size - k, math.floor(alpha * size))
        if n_remove <= 0:
            n_remove = min(size - k, 1)
        scored = [int(i) for i in np.flatnonzero(alive & unprotected)]
        raw = lattice.removal_losses(logp, scored)
        ranked = sorted((raw[tid], tokens[tid]) for tid in raw)
        doomed_ids = [lattice.token_ids[tok] for _, tok in ranked[:n_remove]]
        alive[doomed_ids] = False
        logp[doomed_ids] = float("-inf")
        lattice.retire_tokens(doomed_ids)
        log_total = _logsumexp(logp[alive].tolist() + [unk_lp])
        logp = np.where(alive, logp - log_total, float("-inf"))
        unk_lp -= log_total
        logger.info(
            "pruning round %d: removed %d tokens, %d remain (loglik %.3f)",
            round_no,
            n_remove,
            int(alive.sum()) + 1,
            loglik,
        )

    for _ in range(em_iters_per_round):
        _, expected = lattice.e_step(logp)
        masked = np.where(alive, expected, 0.0)
        logp, unk_lp = _m_step_alive(masked, alive)

    logprobs = {tokens[i]: float(logp[i]) for i in np.flatnonzero(alive)}
    logprobs[model.unk_token] = float(unk_lp)
    return UnigramModel(logprobs, counts.marker, model.unk_token)


def _m_step_alive(expected: np.ndarray, alive: np.ndarray) -> tuple[np.ndarray, float]:
    floor = EXPECTED_COUNT_FLOOR
    floored = np.where(alive, np.maximum(expected, floor), 0.0)
    total = float(floored.sum()) + floor
    logp = np.full(len(expected), float("-inf"))
    live = np.flatnonzero(alive)
    logp[live] = np.log(floored[live]) - math.log(total)
    return logp, math.log(floor) - math.log(total)
