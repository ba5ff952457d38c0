import math
from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from verbaliq.corpus import (EmptyVocabularyError, Vocabulary, build_corpus,
                             build_vocabulary, iter_windows, normalize_tokenize,
                             number_to_words, window_tfidf)


class TestNormalizeTokenize:
    def test_empty_input(self):
        assert normalize_tokenize("") == []

    def test_digit_replacement(self):
        assert normalize_tokenize("It costs 3 dollars") == ["it", "costs", "three", "dollars"]

    def test_boundary_punctuation(self):
        assert normalize_tokenize("Isobar, isotherm.") == ["isobar", "isotherm"]

    def test_multiword_numbers(self):
        assert normalize_tokenize("365") == ["three", "hundred", "sixty", "five"]
        assert normalize_tokenize("21") == ["twenty", "one"]
        assert normalize_tokenize("1000") == ["one", "thousand"]

    def test_out_of_range_and_mixed_kept_verbatim(self):
        assert normalize_tokenize("1234567") == ["1234567"]
        assert normalize_tokenize("3d model") == ["3d", "model"]
        assert normalize_tokenize("1,000") == ["1,000"]

    def test_inner_punctuation_survives(self):
        assert normalize_tokenize("don't stop") == ["don't", "stop"]

    def test_pure_punctuation_vanishes(self):
        assert normalize_tokenize("--- ... !!!") == []

    @settings(max_examples=200, deadline=None)
    @given(st.text(max_size=80))
    def test_idempotent_on_joined_output(self, text):
        once = normalize_tokenize(text)
        assert normalize_tokenize(" ".join(once)) == once

    def test_number_words_cover_range_boundaries(self):
        assert number_to_words(0) == ["zero"]
        assert number_to_words(999_999) == [
            "nine", "hundred", "ninety", "nine", "thousand",
            "nine", "hundred", "ninety", "nine",
        ]
        with pytest.raises(ValueError):
            number_to_words(1_000_000)


class TestBuildVocabulary:
    def test_full_retention(self):
        vocab = build_vocabulary(["a", "a", "b"], min_count=1)
        assert vocab.entries == {"a": (0, 2), "b": (1, 1)}

    def test_threshold_filter(self):
        vocab = build_vocabulary(["a", "a", "b"], min_count=2)
        assert vocab.entries == {"a": (0, 2)}
        assert vocab.dropped_tokens == 1

    def test_empty_vocabulary_signaled(self):
        with pytest.raises(EmptyVocabularyError):
            build_vocabulary(["a", "b"], min_count=3)

    def test_counts_match_independent_oracle(self):
        rng = np.random.default_rng(42)
        tokens = [f"w{i}" for i in rng.integers(0, 37, size=1000)]
        vocab = build_vocabulary(tokens, min_count=1)
        oracle = {}
        for token in tokens:
            oracle[token] = oracle.get(token, 0) + 1
        assert {t: c for t, (_, c) in vocab.entries.items()} == oracle

    def test_ids_dense_by_descending_frequency_ties_lexicographic(self):
        vocab = build_vocabulary(["b", "b", "a", "a", "c"], min_count=1)
        assert vocab.id_of("a") == 0  # ties: a before b
        assert vocab.id_of("b") == 1
        assert vocab.id_of("c") == 2

    def test_token_count_conservation(self):
        tokens = ["x"] * 5 + ["y"] * 2 + ["z"]
        vocab = build_vocabulary(tokens, min_count=2)
        kept = sum(c for _, c in vocab.entries.values())
        assert kept + vocab.dropped_tokens == len(tokens)

    def test_roundtrip_file(self, tmp_path):
        vocab = build_vocabulary(["a", "a", "b"], min_count=1)
        vocab.save(tmp_path / "vocab.tsv")
        loaded = Vocabulary.load(tmp_path / "vocab.tsv")
        assert loaded.entries == vocab.entries


class TestIterWindows:
    def test_single_token(self):
        windows = list(iter_windows([7], window=2))
        assert len(windows) == 1
        assert windows[0].center == 7
        assert windows[0].context == []

    def test_hand_enumeration(self):
        windows = list(iter_windows([0, 1, 2], window=1))
        assert [(w.center, w.context) for w in windows] == [
            (0, [1]), (1, [0, 2]), (2, [1]),
        ]

    def test_one_window_per_position(self):
        corpus = list(range(57))
        windows = list(iter_windows(corpus, window=5))
        assert len(windows) == len(corpus)
        assert all(len(w.context) <= 10 for w in windows)


class TestWindowTfidf:
    def test_token_in_every_window_floors_at_one(self):
        # alternating pair: every context window contains the other token
        corpus = [0, 1] * 10
        vocab = build_vocabulary(["a"] * 10 + ["b"] * 10, min_count=1)
        model = window_tfidf(corpus, vocab, window=3)
        assert model.idf[0] >= 1.0
        assert np.all(model.idf > 0)

    def test_two_window_toy(self):
        corpus = [0, 1]
        model = window_tfidf(corpus, 2, window=1)
        expected = math.log(3 / 2) + 1
        assert model.idf[0] == pytest.approx(expected)
        assert model.idf[1] == pytest.approx(expected)

    def test_matches_bruteforce_window_scan(self):
        rng = np.random.default_rng(7)
        corpus = rng.integers(0, 9, size=100).astype(np.int32)
        model = window_tfidf(corpus, 9, window=2)
        # oracle: enumerate windows, count distinct context membership
        df = Counter()
        for pos in range(len(corpus)):
            lo, hi = max(0, pos - 2), min(len(corpus), pos + 3)
            ctx = {corpus[j] for j in range(lo, hi) if j != pos}
            for token in ctx:
                df[token] += 1
        for token in range(9):
            expected = math.log((1 + len(corpus)) / (1 + df[token])) + 1
            assert model.idf[token] == pytest.approx(expected, rel=1e-12)

    def test_absent_token_gets_max_idf_positive(self):
        corpus = [0] * 5
        model = window_tfidf(corpus, 3, window=1)
        assert model.idf[2] == pytest.approx(math.log(6) + 1)
        assert model.idf[2] > 0


class TestBuildCorpus:
    def test_pipeline_drops_rare_tokens_from_stream(self):
        raw = "apple apple apple pear"
        result = build_corpus(raw, min_count=2, window=2)
        assert len(result.corpus_ids) == 3
        assert result.dropped_tokens == 1

    def test_idf_covers_vocabulary(self):
        result = build_corpus("a b c a b a", min_count=1, window=2)
        assert len(result.tfidf.idf) == len(result.vocabulary)
