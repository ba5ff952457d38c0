import numpy as np
import pytest

from verbaliq.corpus import ContextWindow, TfIdfModel, build_vocabulary, window_tfidf
from verbaliq.embeddings import EmbeddingTable
from verbaliq.senses import (Sense, SenseInventory, batch_context_vectors,
                             context_vector, gloss_vector, greedy_match,
                             match_clusters_to_senses, relabel_corpus,
                             spherical_kmeans)
from verbaliq.skipgram import TrainConfig, train_skipgram
from verbaliq.synth import make_topic_world, plant_pseudoword


def greedy_match_oracle(distances):
    """Independent greedy formulation: sort all pairs, take first available."""
    k = len(distances)
    pairs = sorted(
        (distances[i][j], i, j) for i in range(k) for j in range(k)
    )
    used_rows, used_cols = set(), set()
    mapping = [-1] * k
    for _, i, j in pairs:
        if i in used_rows or j in used_cols:
            continue
        mapping[i] = j
        used_rows.add(i)
        used_cols.add(j)
    return mapping


class TestContextVector:
    def test_uniform_weight_mean(self):
        vectors = np.array([[1.0, 0.0], [0.0, 1.0], [2.0, 2.0]])
        tfidf = TfIdfModel(idf=np.array([3.0, 3.0, 3.0]), window=1, window_count=1)
        window = ContextWindow(center=2, context=[0, 1], position=5)
        result = context_vector(window, tfidf, vectors)
        expected = 3.0 * (vectors[0] + vectors[1]) / 2
        np.testing.assert_allclose(result, expected)

    def test_weighted_example(self):
        vectors = np.array([[1.0, 0.0], [0.0, 1.0]])
        tfidf = TfIdfModel(idf=np.array([1.0, 2.0]), window=1, window_count=1)
        window = ContextWindow(center=0, context=[0, 1], position=0)
        result = context_vector(window, tfidf, vectors)
        np.testing.assert_allclose(result, [0.5, 1.0])

    def test_truncated_boundary_still_divides_by_full_width(self):
        vectors = np.array([[5.0, 5.0], [4.0, 0.0]])
        tfidf = TfIdfModel(idf=np.array([1.0, 1.5]), window=2, window_count=1)
        window = ContextWindow(center=0, context=[1], position=0)
        result = context_vector(window, tfidf, vectors)
        np.testing.assert_allclose(result, 1.5 * vectors[1] / 4.0)

    def test_empty_context_returns_none(self):
        tfidf = TfIdfModel(idf=np.array([1.0]), window=2, window_count=1)
        assert context_vector(ContextWindow(0, [], 0), tfidf, np.eye(1)) is None

    def test_batch_agrees_with_scalar_path(self):
        rng = np.random.default_rng(3)
        ids = rng.integers(0, 6, size=40).astype(np.int32)
        vectors = rng.normal(size=(6, 4))
        vocab_size = 6
        tfidf = window_tfidf(ids, vocab_size, window=2)
        positions = np.arange(len(ids))
        batch, usable = batch_context_vectors(ids, positions, tfidf, vectors)
        assert usable.all()
        from verbaliq.corpus import iter_windows

        for window in iter_windows(ids, 2):
            scalar = context_vector(window, tfidf, vectors)
            np.testing.assert_allclose(batch[window.position], scalar, atol=1e-12)

    def test_linearity_in_embeddings(self):
        rng = np.random.default_rng(4)
        vectors = rng.normal(size=(5, 3))
        tfidf = TfIdfModel(idf=rng.random(5) + 0.5, window=2, window_count=9)
        window = ContextWindow(center=0, context=[1, 2, 2, 4], position=3)
        base = context_vector(window, tfidf, vectors)
        scaled = context_vector(window, tfidf, 2.5 * vectors)
        np.testing.assert_allclose(scaled, 2.5 * base, rtol=1e-12)


class TestSphericalKMeans:
    def test_single_cluster_is_normalized_mean(self):
        rng = np.random.default_rng(0)
        points = rng.normal(size=(20, 4)) + 3.0
        result = spherical_kmeans(points, k=1, seed=1)
        unit = points / np.linalg.norm(points, axis=1, keepdims=True)
        mean = unit.sum(axis=0)
        np.testing.assert_allclose(result.centroids[0], mean / np.linalg.norm(mean),
                                   atol=1e-12)

    def test_two_bundles_beat_bruteforce_partition(self):
        rng = np.random.default_rng(5)
        bundle_a = np.array([1.0, 0.0]) + rng.normal(scale=0.05, size=(6, 2))
        bundle_b = np.array([0.0, 1.0]) + rng.normal(scale=0.05, size=(6, 2))
        points = np.vstack([bundle_a, bundle_b])
        result = spherical_kmeans(points, k=2, seed=3)
        unit = points / np.linalg.norm(points, axis=1, keepdims=True)
        best = -np.inf
        for mask in range(1, 2 ** 12 - 1):
            sel = np.array([(mask >> i) & 1 for i in range(12)], dtype=bool)
            best = max(best, np.linalg.norm(unit[sel].sum(axis=0))
                       + np.linalg.norm(unit[~sel].sum(axis=0)))
        assert result.objective_history[-1] == pytest.approx(best, abs=1e-9)
        labels = result.assignments
        assert len(set(labels[:6])) == 1 and len(set(labels[6:])) == 1
        assert labels[0] != labels[6]

    def test_singleton_clusters_when_k_equals_n(self):
        rng = np.random.default_rng(8)
        points = rng.normal(size=(7, 5))
        result = spherical_kmeans(points, k=7, seed=2)
        assert sorted(result.assignments) == list(range(7))
        assert result.objective_history[-1] == pytest.approx(7.0, abs=1e-12)

    def test_objective_monotone_and_centroids_unit(self):
        for seed in range(20):
            rng = np.random.default_rng(seed)
            points = rng.normal(size=(30, 6))
            result = spherical_kmeans(points, k=4, seed=seed)
            history = result.objective_history
            assert all(b - a >= -1e-9 for a, b in zip(history, history[1:]))
            norms = np.linalg.norm(result.centroids, axis=1)
            assert np.all(np.abs(norms - 1) <= 1e-9)

    def test_zero_norm_points_dropped(self):
        points = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 2.0]])
        result = spherical_kmeans(points, k=2, seed=0)
        assert result.dropped_points == 1
        assert result.assignments[0] == -1

    def test_fewer_points_than_k_flags_empty_clusters(self):
        points = np.array([[1.0, 0.0], [0.0, 1.0]])
        result = spherical_kmeans(points, k=3, seed=0)
        assert len(result.empty_clusters) >= 1
        norms = np.linalg.norm(result.centroids, axis=1)
        assert np.all(np.abs(norms - 1) <= 1e-9)

    def test_assignments_invariant_under_positive_scaling(self):
        rng = np.random.default_rng(13)
        points = rng.normal(size=(25, 4))
        base = spherical_kmeans(points, k=3, seed=6)
        scaled = spherical_kmeans(4.0 * points, k=3, seed=6)
        assert np.array_equal(base.assignments, scaled.assignments)


class TestGlossVector:
    def make_table(self):
        words = ["fruit", "tree", "music", "keys", "sweet"]
        vectors = np.arange(25, dtype=np.float64).reshape(5, 5)
        return EmbeddingTable(keys=[(w, 0) for w in words], vectors=vectors)

    def test_singleton_gloss(self):
        emb = self.make_table()
        sense = Sense(id="1", gloss="fruit")
        np.testing.assert_array_equal(gloss_vector(sense, emb), emb.vector("fruit", 0))

    def test_two_token_average(self):
        emb = self.make_table()
        sense = Sense(id="1", gloss="fruit tree")
        expected = (emb.vector("fruit", 0) + emb.vector("tree", 0)) / 2
        np.testing.assert_allclose(gloss_vector(sense, emb), expected)

    def test_record_average_matches_token_scan(self):
        emb = self.make_table()
        sense = Sense(id="1", gloss="a sweet fruit from a tree",
                      examples=["the music of keys", "sweet sweet fruit"])
        tokens = ("a sweet fruit from a tree the music of keys "
                  "sweet sweet fruit").split()
        usable = [t for t in tokens if (t, 0) in emb]
        expected = np.mean([emb.vector(t, 0) for t in usable], axis=0)
        np.testing.assert_allclose(gloss_vector(sense, emb), expected)

    def test_no_usable_tokens_returns_none(self):
        emb = self.make_table()
        assert gloss_vector(Sense(id="1", gloss="xyzzy plugh"), emb) is None


class TestGreedyMatching:
    def test_forced_single_pair(self):
        assert greedy_match(np.array([[0.4]])) == [0]

    def test_diagonal_preference(self):
        mapping = greedy_match(np.array([[0.1, 0.9], [0.5, 0.2]]))
        assert mapping == [0, 1]

    def test_global_minimum_first(self):
        mapping = greedy_match(np.array([[0.3, 0.2], [0.25, 0.9]]))
        assert mapping == [1, 0]

    def test_tie_break_lexicographic(self):
        mapping = greedy_match(np.array([[0.5, 0.5], [0.5, 0.5]]))
        assert mapping == [0, 1]

    def test_matches_independent_oracle(self):
        rng = np.random.default_rng(17)
        for _ in range(300):
            k = int(rng.integers(1, 6))
            dist = rng.random((k, k))
            assert greedy_match(dist) == greedy_match_oracle(dist.tolist())

    def test_vector_interface_is_bijection(self):
        rng = np.random.default_rng(9)
        cents = rng.normal(size=(4, 3))
        glosses = rng.normal(size=(4, 3))
        mapping = match_clusters_to_senses(cents, glosses)
        assert sorted(mapping) == [0, 1, 2, 3]


class TestRelabelCorpus:
    def _pipeline(self, tokens, inventory, seed=0, dim=32, window=3, epochs=2):
        vocab = build_vocabulary(tokens, min_count=1)
        emb = train_skipgram(tokens, vocab, TrainConfig(dim=dim, window=window,
                                                        epochs=epochs, seed=seed))
        ids, _ = vocab.encode(tokens)
        tfidf = window_tfidf(ids, vocab, window)
        return relabel_corpus(tokens, emb, tfidf, inventory, seed)

    def test_monosemous_word_tagged_one(self):
        tokens = ["cat", "dog", "cat", "bird"] * 20
        inventory = SenseInventory(words={"cat": [Sense(id="1", gloss="dog")]})
        result = self._pipeline(tokens, inventory)
        assert all(t == 1 for t in result.tagged.tags)
        assert result.diagnostics["words_single_sense"] == 1

    def test_length_conserved(self):
        tokens = ["a", "b", "c"] * 30
        result = self._pipeline(tokens, SenseInventory(words={}))
        assert len(result.tagged) == len(tokens)

    def test_rare_word_skips_clustering(self):
        tokens = ["rare", "x", "y"] + ["x", "y", "z"] * 30
        inventory = SenseInventory(words={
            "rare": [Sense(id="1", gloss="x"), Sense(id="2", gloss="y")],
        })
        result = self._pipeline(tokens, inventory)
        assert result.flagged_words.get("rare") == "too-rare"
        assert all(t == 1 for t in result.tagged.tags)

    def test_gloss_failure_falls_back_to_sense_one(self):
        tokens = (["poly", "x", "y"] * 20) + (["poly", "z", "w"] * 20)
        inventory = SenseInventory(words={
            "poly": [Sense(id="1", gloss="x"), Sense(id="2", gloss="qqqq")],
        })
        result = self._pipeline(tokens, inventory)
        assert result.flagged_words.get("poly") == "gloss-unmatched"
        poly_tags = [int(t) for tok, t in zip(result.tagged.tokens, result.tagged.tags)
                     if tok == "poly"]
        assert all(t == 1 for t in poly_tags)

    def test_planted_pseudoword_recovered(self):
        world = make_topic_world(4, 8)
        data = plant_pseudoword(world, n_background_tokens=12_000,
                                occurrences_per_sense=60, seed=6)
        result = self._pipeline(data.tokens, data.inventory, seed=1, dim=32,
                                window=3, epochs=2)
        tags = [int(t) for tok, t in zip(result.tagged.tokens, result.tagged.tags)
                if tok == data.pseudoword]
        assert len(tags) == len(data.truth_senses)
        purity = float(np.mean([a == b for a, b in zip(tags, data.truth_senses)]))
        assert purity >= 0.85
        assert all(1 <= t <= 2 for t in tags)

    def test_tagged_corpus_roundtrip(self, tmp_path):
        tokens = ["a", "b"] * 10
        result = self._pipeline(tokens, SenseInventory(words={}))
        path = tmp_path / "tagged.txt"
        result.tagged.save(path)
        from verbaliq.senses import TaggedCorpus

        loaded = TaggedCorpus.load(path)
        assert loaded.tokens == result.tagged.tokens
        assert np.array_equal(loaded.tags, result.tagged.tags)
