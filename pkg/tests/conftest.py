import numpy as np
import pytest

from verbaliq.embeddings import EmbeddingTable

# pass/fail lines recorded by the acceptance tests, echoed after the run
acceptance_lines: list[str] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in acceptance_lines:
            terminalreporter.line(line)


@pytest.fixture
def make_table():
    """Random embedding table: {word: sense_count} -> EmbeddingTable.

    Sense indices start at 1, matching sense-tagged tables.
    """

    def build(words_senses: dict[str, int], dim: int = 8, seed: int = 0,
              scale: float = 1.0) -> EmbeddingTable:
        rng = np.random.default_rng(seed)
        keys = [
            (word, sense)
            for word, count in words_senses.items()
            for sense in range(1, count + 1)
        ]
        vectors = rng.normal(size=(len(keys), dim)) * scale
        return EmbeddingTable(keys=keys, vectors=vectors)

    return build
