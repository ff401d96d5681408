import math
import random

import pytest

from oracles import (
    oracle_corpus_loglik,
    oracle_marginal,
    oracle_token_loss,
    oracle_viterbi,
)
from subtok.corpus import DEFAULT_MARKER, WordCounts, ingest
from subtok.errors import EmptyCorpusError, InfeasibleVocabError
from subtok.unigram import (
    LossTable,
    UnigramModel,
    corpus_loglik,
    em_fit,
    marginal_loglik,
    prune,
    seed_vocab,
    token_losses,
    train_unigram,
    viterbi_tokenize,
)

M = DEFAULT_MARKER

TOY_PROBS = {M + "a": 0.5, "b": 0.3, M: 0.1, "a": 0.1}


def counts_of(entries):
    return WordCounts({M + w: c for w, c in entries.items()})


def toy_model():
    return UnigramModel.from_probs(TOY_PROBS, M)


class TestSeedVocab:
    def test_all_repeated_substrings(self):
        model = seed_vocab(counts_of({"ab": 2}), max_seed=100)
        expected = {M, "a", "b", M + "a", "ab", M + "ab", "<unk>"}
        assert set(model.logprobs) == expected

    def test_single_occurrence_keeps_only_chars(self):
        model = seed_vocab(counts_of({"ab": 1, "cd": 1}), max_seed=100)
        assert set(model.logprobs) == {M, "a", "b", "c", "d", "<unk>"}

    def test_symmetric_corpus_symmetric_probs(self):
        model = seed_vocab(counts_of({"ab": 1, "ba": 1}), max_seed=100)
        assert model.logprobs["a"] == model.logprobs["b"]

    def test_probs_proportional_to_counts(self):
        model = seed_vocab(counts_of({"ab": 2}), max_seed=100)
        # every candidate occurs exactly twice: uniform probabilities
        values = {lp for t, lp in model.logprobs.items() if t != "<unk>"}
        assert len(values) == 1

    def test_max_seed_cap(self):
        counts = counts_of({"abab": 5, "baba": 5})
        capped = seed_vocab(counts, max_seed=6)
        assert len(capped.logprobs) == 7  # 6 candidates + <unk>
        chars = {t for t in capped.logprobs if len(t) == 1}
        assert chars == {M, "a", "b"}

    def test_max_token_len(self):
        model = seed_vocab(counts_of({"abcdef": 3}), max_seed=1000, max_token_len=2)
        assert all(len(t) <= 2 or t == "<unk>" for t in model.logprobs)

    def test_empty_corpus(self):
        with pytest.raises(EmptyCorpusError):
            seed_vocab(WordCounts({}), max_seed=10)

    def test_max_seed_below_chars(self):
        with pytest.raises(InfeasibleVocabError):
            seed_vocab(counts_of({"abcdef": 2}), max_seed=3)


class TestMarginal:
    def test_two_segmentations(self):
        # [M,a,b] = 0.003 and [Ma,b] = 0.15; marginal = 0.153
        got = marginal_loglik(toy_model(), M + "ab")
        assert got == pytest.approx(math.log(0.153), abs=1e-9)

    def test_single_character_word(self):
        model = toy_model()
        assert marginal_loglik(model, M) == pytest.approx(
            model.logprobs[M], abs=1e-12
        )

    def test_chars_only_after_renormalization(self):
        reduced = {t: p for t, p in TOY_PROBS.items() if t != M + "a"}
        model = UnigramModel.from_probs(reduced, M)
        got = marginal_loglik(model, M + "ab")
        # unique segmentation [M, a, b] under renormalized probabilities
        assert got == pytest.approx(math.log(0.2 * 0.2 * 0.6), abs=1e-9)
        assert got == pytest.approx(oracle_marginal(model.logprobs, M + "ab"), abs=1e-12)

    def test_unsegmentable_returns_neg_inf(self):
        model = UnigramModel.from_probs({"a": 0.6, "b": 0.4}, M)
        # no token covers the "x" position and marginals never use <unk>
        assert marginal_loglik(model, "ax") == float("-inf")

    def test_empty_word_rejected(self):
        with pytest.raises(ValueError):
            marginal_loglik(toy_model(), "")

    def test_unk_string_never_matches_surface_text(self):
        model = UnigramModel.from_probs({ch: 1.0 for ch in "<unk>"}, M)
        # the literal text "<unk>" segments through characters only
        expected = sum(model.logprobs[ch] for ch in "<unk>")
        assert marginal_loglik(model, "<unk>") == pytest.approx(expected, abs=1e-9)


class TestViterbi:
    def test_argmax_segmentation(self):
        seg = viterbi_tokenize(toy_model(), M + "ab")
        assert seg.tokens == (M + "a", "b")
        assert seg.log_likelihood == pytest.approx(math.log(0.15), abs=1e-9)

    def test_chars_only_unique_segmentation(self):
        model = UnigramModel.from_probs({M: 0.4, "a": 0.3, "b": 0.3}, M)
        assert viterbi_tokenize(model, M + "ab").tokens == (M, "a", "b")

    def test_tie_prefers_fewer_tokens(self):
        # exact float tie: log p of the whole token equals the sum of parts
        unk_prob = 1.0 - (math.exp(-2.0) + 2 * math.exp(-1.0))
        model = UnigramModel(
            {
                M + "ab": -2.0,
                M + "a": -1.0,
                "b": -1.0,
                "<unk>": math.log(unk_prob),
            },
            M,
        )
        seg = viterbi_tokenize(model, M + "ab")
        assert seg.tokens == (M + "ab",)
        assert seg.log_likelihood == -2.0

    def test_tie_prefers_longest_first_token(self):
        # two 2-token splits with bit-equal scores: (2, 1) beats (1, 2)
        unk_prob = 1.0 - (math.exp(-1.0) + math.exp(-2.0) + math.exp(-3.0) + math.exp(-4.0))
        model = UnigramModel(
            {
                M + "a": -1.0,
                "b": -4.0,
                M: -3.0,
                "ab": -2.0,
                "<unk>": math.log(unk_prob),
            },
            M,
        )
        # [Ma, b] = -5.0 and [M, ab] = -5.0
        seg = viterbi_tokenize(model, M + "ab")
        assert seg.tokens == (M + "a", "b")

    def test_unknown_character_emits_unk(self):
        model = toy_model()
        seg = viterbi_tokenize(model, M + "aq")
        assert seg.tokens == (M + "a", "<unk>")
        assert seg.log_likelihood == pytest.approx(
            math.log(0.5) + model.logprobs["<unk>"], abs=1e-9
        )

    def test_model_tokenize_method(self):
        assert toy_model().tokenize(M + "ab") == (M + "a", "b")

    def test_empty_word_rejected(self):
        with pytest.raises(ValueError):
            viterbi_tokenize(toy_model(), "")


class TestEmFit:
    def test_unique_lattice_reduces_to_counting(self):
        model = UnigramModel.from_probs({M: 0.5, "a": 0.3, "b": 0.2}, M)
        fitted = em_fit(model, counts_of({"ab": 1}), iterations=1)
        for token in (M, "a", "b"):
            assert math.exp(fitted.logprobs[token]) == pytest.approx(1 / 3, abs=1e-9)

    def test_symmetric_corpus_stays_symmetric(self):
        counts = counts_of({"ab": 1, "ba": 1})
        model = seed_vocab(counts, max_seed=100)
        for _ in range(4):
            model = em_fit(model, counts, iterations=1)
            assert math.exp(model.logprobs["a"]) == pytest.approx(
                math.exp(model.logprobs["b"]), abs=1e-12
            )

    def test_monotone_loglik(self):
        rng = random.Random(42)
        for _ in range(10):
            entries = {}
            for _ in range(rng.randint(2, 6)):
                word = "".join(rng.choice("abc") for _ in range(rng.randint(1, 5)))
                entries[word] = rng.randint(1, 4)
            counts = counts_of(entries)
            model = seed_vocab(counts, max_seed=60, max_token_len=4)
            previous = corpus_loglik(model, counts)
            for _ in range(5):
                model = em_fit(model, counts, iterations=1)
                current = corpus_loglik(model, counts)
                assert current >= previous - 1e-9
                previous = current

    def test_invalid_iterations(self):
        with pytest.raises(ValueError):
            em_fit(toy_model(), counts_of({"a": 1}), iterations=0)

    def test_normalization_preserved(self):
        counts = counts_of({"abab": 3, "ba": 2})
        model = seed_vocab(counts, max_seed=50)
        fitted = em_fit(model, counts, iterations=3)
        total = sum(math.exp(lp) for lp in fitted.logprobs.values())
        assert total == pytest.approx(1.0, abs=1e-9)


class TestTokenLosses:
    def test_protected_tokens_absent(self):
        counts = counts_of({"ab": 3})
        model = seed_vocab(counts, max_seed=100)
        table = token_losses(model, counts)
        assert "<unk>" not in table.losses
        assert all(len(t) > 1 for t in table.losses)
        assert table.protected >= {M, "a", "b", "<unk>"}

    def test_unused_token_loss_is_nonpositive(self):
        # "cd" never occurs in the corpus: removing it only frees mass
        probs = {M: 0.2, "a": 0.2, "b": 0.2, "c": 0.14, "d": 0.14, "cd": 0.12}
        model = UnigramModel.from_probs(probs, M)
        counts = counts_of({"ab": 2, "ba": 1, "aa": 1})
        table = token_losses(model, counts)
        assert table.losses["cd"] <= 0.0
        expected = oracle_token_loss(model.logprobs, counts, "cd")
        assert table.losses["cd"] == pytest.approx(expected, abs=1e-9)

    def test_matches_oracle_exactly(self):
        counts = counts_of({"ab": 1})
        probs = {M: 0.25, "a": 0.2, "b": 0.2, M + "ab": 0.35}
        model = UnigramModel.from_probs(probs, M)
        table = token_losses(model, counts)
        expected = oracle_token_loss(model.logprobs, counts, M + "ab")
        assert table.losses[M + "ab"] == pytest.approx(expected, abs=1e-9)

    def test_matches_oracle_on_random_models(self):
        rng = random.Random(2024)
        for _ in range(5):
            entries = {}
            for _ in range(rng.randint(3, 8)):
                word = "".join(rng.choice("abc") for _ in range(rng.randint(2, 5)))
                entries[word] = rng.randint(1, 5)
            counts = counts_of(entries)
            cands = set()
            for w in counts.entries:
                for i in range(len(w)):
                    for j in range(i + 1, min(i + 4, len(w)) + 1):
                        cands.add(w[i:j])
            model = UnigramModel.from_probs(
                {t: rng.random() + 0.05 for t in cands}, M
            )
            table = token_losses(model, counts)
            for token, loss in table.losses.items():
                expected = oracle_token_loss(model.logprobs, counts, token)
                assert loss == pytest.approx(expected, abs=1e-9), token

    def test_small_probability_series_branch(self):
        # thousands of tiny-probability tokens exercise the series path
        rng = random.Random(31)
        words = ["".join(rng.choice("abcd") for _ in range(rng.randint(2, 6))) for _ in range(30)]
        counts = ingest(" ".join(words))
        filler = set()
        while len(filler) < 2000:
            filler.add("".join(rng.choice("abcd") for _ in range(rng.randint(2, 7))))
        probs = {M: 0.2, "a": 0.13, "b": 0.13, "c": 0.13, "d": 0.11}
        for t in sorted(filler):
            probs.setdefault(t, 0.3 / len(filler))
        model = UnigramModel.from_probs(probs, M)
        table = token_losses(model, counts)
        sample = sorted(table.losses)[::200]
        for token in sample:
            expected = oracle_token_loss(model.logprobs, counts, token)
            assert table.losses[token] == pytest.approx(expected, abs=1e-9), token


class TestPrune:
    def make_model(self, n_multi, n_chars=9):
        tokens = {}
        for i in range(n_multi):
            tokens[f"t{i:03d}"] = 1.0
        for i in range(n_chars):
            tokens[chr(ord("a") + i)] = 1.0
        return UnigramModel.from_probs(tokens, M)

    def test_removal_count(self):
        model = self.make_model(90)  # 90 multi + 9 chars + unk = 100
        assert len(model.logprobs) == 100
        losses = LossTable(
            {t: float(i) for i, t in enumerate(sorted(model.logprobs)) if len(t) > 1},
            model.required_tokens,
        )
        pruned = prune(model, losses, k=50, alpha=0.25)
        assert len(pruned.logprobs) == 75  # removed floor(0.25 * 100) = 25

    def test_boundary_sixty(self):
        model = self.make_model(50)  # 50 + 9 + 1 = 60
        losses = LossTable(
            {t: float(i) for i, t in enumerate(sorted(model.logprobs)) if len(t) > 1},
            model.required_tokens,
        )
        pruned = prune(model, losses, k=50, alpha=0.25)
        assert len(pruned.logprobs) == 50  # removed min(10, 15) = 10

    def test_vocab_already_at_k(self):
        model = self.make_model(40)  # |V| = 50
        losses = LossTable({}, model.required_tokens)
        assert prune(model, losses, k=50, alpha=0.25) == model

    def test_smallest_losses_removed_first(self):
        model = UnigramModel.from_probs(
            {M: 1.0, "a": 1.0, "b": 1.0, "aa": 1.0, "ab": 1.0, "ba": 1.0, "bb": 1.0}, M
        )
        losses = LossTable(
            {"aa": 5.0, "ab": 1.0, "ba": 3.0, "bb": 2.0}, model.required_tokens
        )
        pruned = prune(model, losses, k=6, alpha=1.0)
        # removes min(8-6, 8) = 2 tokens with the smallest losses
        assert "ab" not in pruned.logprobs
        assert "bb" not in pruned.logprobs
        assert "aa" in pruned.logprobs and "ba" in pruned.logprobs

    def test_protected_never_removed(self):
        model = UnigramModel.from_probs({M: 1.0, "a": 1.0, "xy": 1.0}, M)
        losses = LossTable({"xy": 100.0}, model.required_tokens)
        pruned = prune(model, losses, k=3, alpha=1.0)
        # the only removable token is the unprotected one
        assert set(pruned.logprobs) == {M, "a", "<unk>"}

    def test_renormalizes(self):
        model = UnigramModel.from_probs(
            {M: 1.0, "a": 1.0, "aa": 2.0, "ab": 1.0}, M
        )
        losses = LossTable({"aa": 1.0, "ab": 0.5}, model.required_tokens)
        pruned = prune(model, losses, k=4, alpha=0.5)
        total = sum(math.exp(lp) for lp in pruned.logprobs.values())
        assert total == pytest.approx(1.0, abs=1e-9)

    def test_infeasible_k(self):
        model = UnigramModel.from_probs({M: 1.0, "a": 1.0, "b": 1.0}, M)
        with pytest.raises(InfeasibleVocabError):
            prune(model, LossTable({}, model.required_tokens), k=2, alpha=0.5)

    def test_alpha_range(self):
        model = self.make_model(10)
        with pytest.raises(ValueError):
            prune(model, LossTable({}, model.required_tokens), k=5, alpha=1.5)


class TestTrainUnigram:
    def test_reaches_exact_size(self):
        counts = counts_of({"ab": 4, "ba": 1})
        model = train_unigram(counts, 5, alpha=0.25)
        assert len(model.logprobs) == 5
        total = sum(math.exp(lp) for lp in model.logprobs.values())
        assert total == pytest.approx(1.0, abs=1e-9)

    def test_loss_ranking_matches_oracle_during_pruning(self):
        counts = counts_of({"ab": 4, "ba": 1})
        seeded = seed_vocab(counts, max_seed=100)
        fitted = em_fit(seeded, counts, iterations=2)
        table = token_losses(fitted, counts)
        oracle_rank = sorted(
            table.losses,
            key=lambda t: (oracle_token_loss(fitted.logprobs, counts, t), t),
        )
        lib_rank = sorted(table.losses, key=lambda t: (table.losses[t], t))
        assert lib_rank == oracle_rank

    def test_no_pruning_when_seed_small(self):
        counts = counts_of({"ab": 4, "ba": 1})
        seeded = seed_vocab(counts, max_seed=100)
        model = train_unigram(counts, 50, alpha=0.25)
        assert len(model.logprobs) == len(seeded.logprobs)

    def test_infeasible_k(self):
        with pytest.raises(InfeasibleVocabError):
            train_unigram(counts_of({"ab": 2}), 3)  # 3 chars + unk need 4

    def test_deterministic(self):
        counts = counts_of({"abab": 5, "baba": 3, "aabb": 2})
        a = train_unigram(counts, 6)
        b = train_unigram(counts, 6)
        assert a.logprobs == b.logprobs

    def test_tiny_alpha_still_terminates(self):
        counts = counts_of({"abab": 5, "baba": 3})
        model = train_unigram(counts, 5, alpha=0.0)
        assert len(model.logprobs) == 5


class TestOracleEquivalenceSmoke:
    def test_random_models_match_enumeration(self):
        rng = random.Random(77)
        for _ in range(100):
            alphabet = "ab" if rng.random() < 0.5 else "abc"
            tokens = {ch: rng.random() + 0.05 for ch in alphabet}
            tokens[M] = rng.random() + 0.05
            while len(tokens) < 8 and rng.random() < 0.8:
                length = rng.randint(2, 4)
                tok = "".join(rng.choice(alphabet) for _ in range(length))
                if rng.random() < 0.3:
                    tok = M + tok[:-1]
                tokens.setdefault(tok, rng.random() + 0.05)
            model = UnigramModel.from_probs(tokens, M)
            word = M + "".join(rng.choice(alphabet) for _ in range(rng.randint(1, 5)))
            seg = viterbi_tokenize(model, word)
            oracle_tokens, oracle_score = oracle_viterbi(model.logprobs, word)
            assert seg.tokens == oracle_tokens
            assert seg.log_likelihood == pytest.approx(oracle_score, abs=1e-9)
            assert marginal_loglik(model, word) == pytest.approx(
                oracle_marginal(model.logprobs, word), abs=1e-9
            )
