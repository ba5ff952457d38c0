import numpy as np
import pytest

from verbaliq.embeddings import EmbeddingTable, make_key, split_key


class TestKeys:
    def test_roundtrip(self):
        assert split_key(make_key("bank", 2)) == ("bank", 2)
        assert split_key("word#0") == ("word", 0)

    def test_bare_token_defaults_to_sense_one(self):
        assert split_key("plain") == ("plain", 1)

    def test_hash_in_word_without_digit_suffix(self):
        assert split_key("c#") == ("c#", 1)
        assert split_key("c##3") == ("c#", 3)


class TestEmbeddingTable:
    def make(self):
        keys = [("bank", 1), ("bank", 2), ("river", 1)]
        vectors = np.array([[1.0, 2.0], [3.0, 4.0], [5.0, 6.0]])
        return EmbeddingTable(keys=keys, vectors=vectors)

    def test_lookup_and_senses(self):
        table = self.make()
        assert table.senses_of("bank") == [1, 2]
        assert table.senses_of("ghost") == []
        np.testing.assert_array_equal(table.vector("bank", 2), [3.0, 4.0])
        assert ("bank", 1) in table and "river" in table

    def test_sense_vectors_stacked_in_order(self):
        table = self.make()
        np.testing.assert_array_equal(table.sense_vectors("bank"),
                                      [[1.0, 2.0], [3.0, 4.0]])

    def test_mismatched_shapes_rejected(self):
        with pytest.raises(ValueError):
            EmbeddingTable(keys=[("a", 1)], vectors=np.zeros((2, 3)))

    def test_file_roundtrip_exact(self, tmp_path):
        rng = np.random.default_rng(0)
        keys = [(f"w{i}", s) for i in range(5) for s in (0, 1)]
        table = EmbeddingTable(keys=keys, vectors=rng.normal(size=(10, 7)))
        path = tmp_path / "emb.txt"
        table.save(path)
        loaded = EmbeddingTable.load(path)
        assert loaded.keys == table.keys
        # repr round-trips float64 exactly
        assert np.array_equal(loaded.vectors, table.vectors)

    def test_header_format(self, tmp_path):
        table = self.make()
        path = tmp_path / "emb.txt"
        table.save(path)
        first = path.read_text().splitlines()[0]
        assert first == "3 2"
