"""Synthetic corpora with planted ground truth.

Words are grouped into topics; sentences draw from a single topic, so
trained embeddings cluster by topic. On top of that base structure the
builders plant recoverable signals: a pseudoword whose occurrences come
from two different topics (known-sense ground truth), synonym cliques,
and cross-topic synonym/antonym pairs that only the relation triples
connect.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .embeddings import make_key
from .relations import ANTONYM_RELATION, SYNONYM_RELATION, RelationTriple
from .senses import Sense, SenseInventory


@dataclass
class TopicWorld:
    topics: list[list[str]]

    @property
    def words(self) -> list[str]:
        return [w for topic in self.topics for w in topic]


def make_topic_world(n_topics: int, words_per_topic: int, prefix: str = "t") -> TopicWorld:
    topics = [
        [f"{prefix}{t:02d}w{i:02d}" for i in range(words_per_topic)]
        for t in range(n_topics)
    ]
    return TopicWorld(topics=topics)


def topic_sentences(world: TopicWorld, n_tokens: int, seed: int,
                    sentence_len: int = 12) -> list[str]:
    """Token stream of topic-pure sentences totalling ~n_tokens."""
    rng = np.random.default_rng(seed)
    tokens: list[str] = []
    while len(tokens) < n_tokens:
        topic = world.topics[int(rng.integers(len(world.topics)))]
        picks = rng.integers(len(topic), size=sentence_len)
        tokens.extend(topic[int(i)] for i in picks)
    return tokens[:n_tokens]


@dataclass
class PseudowordData:
    tokens: list[str]
    pseudoword: str
    truth_senses: list[int]  # gold sense per occurrence, in corpus order
    inventory: SenseInventory


def plant_pseudoword(world: TopicWorld, n_background_tokens: int,
                     occurrences_per_sense: int, seed: int,
                     topic_a: int = 0, topic_b: int = 1,
                     pseudoword: str = "pseudo") -> PseudowordData:
    """Merge two topic-specific fake words into one surface form.

    Sense 1 occurrences appear amid topic-a words, sense 2 amid topic-b
    words; the inventory glosses each sense with words from its topic.
    """
    rng = np.random.default_rng(seed)
    background = topic_sentences(world, n_background_tokens, seed + 1)
    a_words = world.topics[topic_a]
    b_words = world.topics[topic_b]

    occurrences = []
    for sense, topic in ((1, a_words), (2, b_words)):
        for _ in range(occurrences_per_sense):
            left = [topic[int(i)] for i in rng.integers(len(topic), size=5)]
            right = [topic[int(i)] for i in rng.integers(len(topic), size=5)]
            occurrences.append((sense, left + [pseudoword] + right))
    order = rng.permutation(len(occurrences))

    # spread the occurrences evenly through the background stream
    tokens: list[str] = []
    truth: list[int] = []
    gap = max(1, len(background) // (len(occurrences) + 1))
    cursor = 0
    for idx in order:
        sense, sentence = occurrences[int(idx)]
        tokens.extend(background[cursor:cursor + gap])
        cursor += gap
        tokens.extend(sentence)
        truth.append(sense)
    tokens.extend(background[cursor:])

    inventory = SenseInventory(words={
        pseudoword: [
            Sense(id="1", gloss=" ".join(a_words[:6]), examples=[" ".join(a_words[6:10])]),
            Sense(id="2", gloss=" ".join(b_words[:6]), examples=[" ".join(b_words[6:10])]),
        ],
    })
    return PseudowordData(tokens=tokens, pseudoword=pseudoword,
                          truth_senses=truth, inventory=inventory)


@dataclass
class RelationWorldData:
    tagged_tokens: list[str]
    triples: list[RelationTriple]
    synonym_pairs: list[tuple[str, str]]
    antonym_pairs: list[tuple[str, str]]
    words: list[str]


def plant_relation_world(seed: int, n_topics: int = 24, words_per_topic: int = 12,
                         n_tokens: int = 240_000, n_synonym: int = 20,
                         n_antonym: int = 20) -> RelationWorldData:
    """Topic corpus plus cross-topic synonym/antonym triples.

    Each planted pair links words from different topics, so co-occurrence
    alone cannot recover the pairing; only the triples carry it. All
    tokens are emitted sense-tagged (everything is monosemous here).
    """
    world = make_topic_world(n_topics, words_per_topic)
    rng = np.random.default_rng(seed)
    tokens = topic_sentences(world, n_tokens, seed + 7)

    flat = world.words
    topic_of = {w: t for t, topic in enumerate(world.topics) for w in topic}
    used: set[str] = set()
    syn_pairs: list[tuple[str, str]] = []
    ant_pairs: list[tuple[str, str]] = []
    for pairs, count in ((syn_pairs, n_synonym), (ant_pairs, n_antonym)):
        attempts = 0
        while len(pairs) < count:
            attempts += 1
            if attempts > 10_000:
                raise ValueError("could not plant enough cross-topic pairs")
            first = flat[int(rng.integers(len(flat)))]
            second = flat[int(rng.integers(len(flat)))]
            if first in used or second in used or first == second:
                continue
            if topic_of[first] == topic_of[second]:
                continue
            used.update((first, second))
            pairs.append((first, second))

    triples = [
        RelationTriple(head=(a, 1), relation=SYNONYM_RELATION, tail=(b, 1))
        for a, b in syn_pairs
    ] + [
        RelationTriple(head=(a, 1), relation=ANTONYM_RELATION, tail=(b, 1))
        for a, b in ant_pairs
    ]
    tagged = [make_key(token, 1) for token in tokens]
    return RelationWorldData(tagged_tokens=tagged, triples=triples,
                             synonym_pairs=syn_pairs, antonym_pairs=ant_pairs,
                             words=flat)


def plant_question_world(seed: int, n_cliques: int = 10, clique_size: int = 5,
                         n_pair_relations: int = 60,
                         n_loose_words: int = 120) -> tuple[list[str], list[RelationTriple]]:
    """Vocabulary and triples rich enough to generate full question sets:
    fully-connected synonym cliques, antonym pairs, and a pool of loose
    distractor words."""
    rng = np.random.default_rng(seed)
    words: list[str] = [f"loose{i:03d}" for i in range(n_loose_words)]
    triples: list[RelationTriple] = []
    for c in range(n_cliques):
        clique = [f"c{c:02d}m{i}" for i in range(clique_size)]
        words.extend(clique)
        for i, a in enumerate(clique):
            for b in clique[i + 1:]:
                triples.append(RelationTriple(head=(a, 1), relation=SYNONYM_RELATION, tail=(b, 1)))
    for p in range(n_pair_relations):
        a, b = f"ant{p:02d}a", f"ant{p:02d}b"
        words.extend((a, b))
        triples.append(RelationTriple(head=(a, 1), relation=ANTONYM_RELATION, tail=(b, 1)))
    rng.shuffle(words)
    return words, triples
