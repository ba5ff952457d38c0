import numpy as np
import pytest

from verbaliq.corpus import build_vocabulary
from verbaliq.skipgram import (SkipgramModel, TrainConfig, _sample_cdf, mix_seed,
                               negative_sample, pairs_per_epoch, train_skipgram,
                               unigram_cdf)


def small_vocab(counts: dict[str, int]):
    tokens = [t for t, c in counts.items() for _ in range(c)]
    return build_vocabulary(tokens, min_count=1)


class TestNegativeSampling:
    def test_symmetric_counts_give_uniform(self):
        vocab = small_vocab({"a": 1, "b": 1})
        rng = np.random.default_rng(0)
        draws = negative_sample(vocab, rng, 200_000)
        freq = np.bincount(draws, minlength=2) / len(draws)
        assert freq == pytest.approx([0.5, 0.5], abs=0.005)

    def test_skewed_counts_follow_power_formula(self):
        vocab = small_vocab({"a": 8, "b": 1})
        expected_a = 8**0.75 / (8**0.75 + 1)
        assert expected_a == pytest.approx(0.826, abs=0.001)
        rng = np.random.default_rng(1)
        draws = negative_sample(vocab, rng, 200_000)
        freq_a = float(np.mean(draws == vocab.id_of("a")))
        sigma = np.sqrt(expected_a * (1 - expected_a) / len(draws))
        assert abs(freq_a - expected_a) <= 3 * sigma

    def test_million_draw_calibration(self):
        counts = {"a": 100, "b": 10, "c": 1}
        vocab = small_vocab(counts)
        weights = np.array([100, 10, 1], dtype=float) ** 0.75
        target = weights / weights.sum()
        # ids are frequency-ordered so targets align with ids
        rng = np.random.default_rng(2)
        draws = negative_sample(vocab, rng, 1_000_000)
        freq = np.bincount(draws, minlength=3) / len(draws)
        sigma = np.sqrt(target * (1 - target) / len(draws))
        assert np.all(np.abs(freq - target) <= 3 * sigma)


class TestSgdStep:
    def make_model(self, seed=0, dim=8, vocab_size=6):
        config = TrainConfig(dim=dim, window=2, negatives=3, epochs=1, seed=seed)
        counts = np.arange(1, vocab_size + 1)
        return SkipgramModel(vocab_size, counts, config)

    def test_zero_lr_leaves_parameters_unchanged(self):
        model = self.make_model()
        before_in, before_out = model.w_in.copy(), model.w_out.copy()
        model.sgd_step(0, 1, [2, 3], lr=0.0)
        assert np.array_equal(model.w_in, before_in)
        assert np.array_equal(model.w_out, before_out)

    def test_single_step_decreases_loss(self):
        model = self.make_model(seed=3)
        # non-trivial output vectors so the loss moves
        rng = np.random.default_rng(4)
        model.w_out = rng.normal(size=model.w_out.shape) * 0.3
        before = model.pair_loss(0, 1, [2, 3])
        model.sgd_step(0, 1, [2, 3], lr=0.05)
        after = model.pair_loss(0, 1, [2, 3])
        assert after < before

    def test_gradient_matches_finite_differences(self):
        rng = np.random.default_rng(11)
        for _ in range(30):
            dim = int(rng.integers(2, 9))
            model = self.make_model(seed=int(rng.integers(1000)), dim=dim)
            model.w_in = rng.normal(size=model.w_in.shape) * 0.5
            model.w_out = rng.normal(size=model.w_out.shape) * 0.5
            center, context = 0, 1
            negatives = [2, 3]  # distinct rows: one step extracts the exact gradient

            probe = SkipgramModel(6, np.arange(1, 7), model.config)
            probe.w_in = model.w_in.copy()
            probe.w_out = model.w_out.copy()
            probe.sgd_step(center, context, negatives, lr=1.0)
            # ascent direction on log-likelihood == -gradient of the loss
            analytic = np.concatenate([
                -(probe.w_in[center] - model.w_in[center]),
                -(probe.w_out[context] - model.w_out[context]),
                -(probe.w_out[2] - model.w_out[2]),
                -(probe.w_out[3] - model.w_out[3]),
            ])

            h = 1e-6
            fd = np.empty_like(analytic)
            slots = ([("in", center, d) for d in range(dim)]
                     + [("out", context, d) for d in range(dim)]
                     + [("out", 2, d) for d in range(dim)]
                     + [("out", 3, d) for d in range(dim)])
            for k, (table, row, d) in enumerate(slots):
                target = model.w_in if table == "in" else model.w_out
                original = target[row, d]
                target[row, d] = original + h
                up = model.pair_loss(center, context, negatives)
                target[row, d] = original - h
                down = model.pair_loss(center, context, negatives)
                target[row, d] = original
                fd[k] = (up - down) / (2 * h)
            rel = np.linalg.norm(analytic - fd) / max(np.linalg.norm(fd), 1e-12)
            assert rel <= 1e-4


class TestTrainSkipgram:
    def test_zero_epochs_returns_initialization(self):
        vocab = small_vocab({"a": 2, "b": 2})
        config = TrainConfig(dim=8, epochs=0, seed=5)
        table = train_skipgram(["a", "b", "a", "b"], vocab, config)
        reference = SkipgramModel(len(vocab), vocab.counts, config)
        assert np.array_equal(table.vectors, reference.w_in)

    def test_shape_contract(self):
        vocab = small_vocab({"a": 4, "b": 3, "c": 2})
        table = train_skipgram(["a", "b", "c", "a", "b", "a"] * 3, vocab,
                               TrainConfig(dim=12, epochs=1, seed=0))
        assert len(table) == 3
        assert table.dimension == 12
        assert table.role == "center"
        assert table.senses_of("a") == [0]

    def test_empty_corpus_rejected(self):
        vocab = small_vocab({"a": 1})
        with pytest.raises(ValueError):
            train_skipgram([], vocab, TrainConfig(epochs=1))

    def test_toy_corpus_similarity_gap(self):
        tokens = ["a", "b"] * 500 + ["c", "d"] * 500
        vocab = build_vocabulary(tokens, min_count=1)
        table = train_skipgram(tokens, vocab, TrainConfig(dim=16, window=2, epochs=3, seed=1))

        def cos(u, v):
            return float(u @ v / (np.linalg.norm(u) * np.linalg.norm(v)))

        gap = cos(table.vector("a", 0), table.vector("b", 0)) - \
            cos(table.vector("a", 0), table.vector("c", 0))
        assert gap >= 0.2

    def test_seeded_runs_bit_reproducible(self):
        tokens = ["a", "b", "c"] * 100
        vocab = build_vocabulary(tokens, min_count=1)
        config = TrainConfig(dim=8, window=2, epochs=2, seed=9)
        first = train_skipgram(tokens, vocab, config)
        second = train_skipgram(tokens, vocab, config)
        assert np.array_equal(first.vectors, second.vectors)

    def test_all_parameters_finite_after_training(self):
        tokens = ["a", "b", "c", "d"] * 200
        vocab = build_vocabulary(tokens, min_count=1)
        table = train_skipgram(tokens, vocab, TrainConfig(dim=16, epochs=3, seed=2,
                                                          learning_rate=0.5))
        assert np.isfinite(table.vectors).all()

    def test_kernel_matches_reference_update_sequence(self):
        tokens = ["a", "b", "c", "d", "e"] * 12
        vocab = build_vocabulary(tokens, min_count=1)
        config = TrainConfig(dim=6, window=2, negatives=2, epochs=1, seed=13)
        ids, _ = vocab.encode(tokens)

        kernel_model = SkipgramModel(len(vocab), vocab.counts, config)
        total = config.epochs * pairs_per_epoch(len(ids), config.window)
        kernel_model.run_block(ids, 0, len(ids), total)

        ref = SkipgramModel(len(vocab), vocab.counts, config)
        state = np.array([mix_seed(config.seed)], dtype=np.uint64)
        done = 0
        for pos in range(len(ids)):
            lo, hi = max(0, pos - 2), min(len(ids), pos + 3)
            for j in range(lo, hi):
                if j == pos:
                    continue
                frac = max(1.0 - done / total, config.min_lr_fraction)
                negatives = [_sample_cdf(ref.cdf, state) for _ in range(config.negatives)]
                ref.sgd_step(int(ids[pos]), int(ids[j]), negatives,
                             config.learning_rate * frac)
                done += 1
        np.testing.assert_allclose(kernel_model.w_in, ref.w_in, rtol=1e-9, atol=1e-12)
        np.testing.assert_allclose(kernel_model.w_out, ref.w_out, rtol=1e-9, atol=1e-12)


class TestHelpers:
    def test_pairs_per_epoch_exact(self):
        # window 2, length 5: position pair counts 2,3,4,3,2 = 14
        assert pairs_per_epoch(5, 2) == 14
        assert pairs_per_epoch(1, 5) == 0

    def test_unigram_cdf_terminates_at_one(self):
        cdf = unigram_cdf(np.array([5, 3, 1]))
        assert cdf[-1] == 1.0
        assert np.all(np.diff(cdf) > 0)
