"""Shared fixtures: schemas, fixture datasets, and a synthetic corpus builder."""

from __future__ import annotations

import numpy as np
import pytest

from sensemodels import (
    ContingencyTable,
    InteractionGraph,
    VariableSchema,
    build_table,
    junction_tree,
)

SENSES = ("1", "2", "3", "4", "5", "6")

# Table-1-like sense proportions for synthetic corpora.
SENSE_WEIGHTS = {"1": 0.15, "2": 0.01, "3": 0.03, "4": 0.08, "5": 0.21, "6": 0.52}

# Planted indicator forms (the informative collocations) with their
# per-sense presence probabilities; everything else is noise vocabulary.
INDICATORS = {
    "rate": {"6": 0.85, "5": 0.10, "default": 0.05},
    "percent": {"6": 0.75, "default": 0.08},
    "short": {"5": 0.70, "default": 0.04},
    "pursue": {"3": 0.80, "1": 0.20, "default": 0.03},
    "in": {"4": 0.90, "6": 0.45, "default": 0.15},
}

NOISE_VOCAB = [
    ("the", "DT", 0.9), ("a", "DT", 0.5), ("of", "IN", 0.45), ("to", "TO", 0.4),
    ("bank", "NN", 0.25), ("money", "NN", 0.2), ("rose", "VBD", 0.2),
    ("paid", "VBN", 0.18), ("big", "JJ", 0.15), ("quickly", "RB", 0.1),
    ("company", "NN", 0.22), ("declared", "VBD", 0.12), ("group", "NN", 0.12),
    ("yearly", "JJ", 0.08), ("on", "IN", 0.3), ("market", "NN", 0.17),
]

INDICATOR_POS = {"rate": "NN", "percent": "NN", "short": "JJ", "pursue": "VB", "in": "IN"}


def synthetic_corpus(n_sentences: int, seed: int, senses=SENSES) -> str:
    """A sense-annotated corpus with planted collocation/POS/ending structure."""
    rng = np.random.default_rng(seed)
    sense_list = list(senses)
    probs = np.array([SENSE_WEIGHTS[s] for s in sense_list])
    probs = probs / probs.sum()
    lines = ["# synthetic sense-tagged corpus"]
    for _ in range(n_sentences):
        sense = sense_list[int(rng.choice(len(sense_list), p=probs))]
        tokens: list[str] = []
        for form, pos, base in NOISE_VOCAB:
            if rng.random() < base:
                tokens.append(f"{form}|{pos}")
        for form, table in INDICATORS.items():
            if rng.random() < table.get(sense, table["default"]):
                tokens.append(f"{form}|{INDICATOR_POS[form]}")
        rng.shuffle(tokens)
        # plural form correlates with senses 3 and 4
        plural = rng.random() < (0.7 if sense in ("3", "4") else 0.15)
        target = ("interests|NNS" if plural else "interest|NN") + f"|sense={sense}"
        where = int(rng.integers(0, len(tokens) + 1))
        tokens.insert(where, target)
        lines.append(" ".join(tokens))
    return "\n".join(lines) + "\n"


@pytest.fixture(scope="session")
def binary_schema_2():
    return VariableSchema([("a", ("0", "1")), ("b", ("0", "1"))])


@pytest.fixture(scope="session")
def example_schema_5():
    """Binary f1..f4 plus tag, as in the two-clique worked example."""
    return VariableSchema([(n, ("0", "1")) for n in ("f1", "f2", "f3", "f4", "tag")])


@pytest.fixture(scope="session")
def example_model_5(example_schema_5):
    """Cliques {f1,f3,f4,tag} and {f2,f3,f4,tag}: f1 and f2 independent given the rest."""
    names = example_schema_5.names
    edges = [
        (u, v)
        for i, u in enumerate(names)
        for v in names[i + 1 :]
        if {u, v} != {"f1", "f2"}
    ]
    return junction_tree(InteractionGraph(names, edges))


def example_model_generating_table(schema) -> ContingencyTable:
    """A dependence-rich count table whose decomposable projection onto the
    two-clique example model has strong effects on every edge."""
    p_tag1 = 0.5
    counts = np.zeros(schema.num_cells, dtype=np.int64)
    for idx in range(schema.num_cells):
        cell = schema.assignment_of(idx)
        f1, f2, f3, f4, tag = (int(cell[v]) for v in ("f1", "f2", "f3", "f4", "tag"))
        p = p_tag1 if tag else 1 - p_tag1
        p3 = 0.8 if tag else 0.2
        p *= p3 if f3 else 1 - p3
        p4 = (0.1, 0.6, 0.4, 0.9)[2 * f3 + tag]
        p *= p4 if f4 else 1 - p4
        p1 = 0.85 if (f3 ^ f4 ^ tag) else 0.15
        p *= p1 if f1 else 1 - p1
        p2 = 0.8 if (f3 + f4 + tag >= 2) else 0.2
        p *= p2 if f2 else 1 - p2
        counts[idx] = max(1, round(200000 * p))
    return ContingencyTable(schema, counts)


NB_FIXTURE_SCHEMA = VariableSchema(
    [
        ("r1pos", ("N", "V")),
        ("l1pos", ("D", "N")),
        ("ending", ("singular", "plural")),
        ("tag", ("1", "2", "3")),
    ]
)

# 20 fixed instances over (r1pos, l1pos, ending, tag).
NB_FIXTURE_ROWS = [
    {"r1pos": "N", "l1pos": "D", "ending": "singular", "tag": "1"},
    {"r1pos": "N", "l1pos": "D", "ending": "singular", "tag": "1"},
    {"r1pos": "N", "l1pos": "N", "ending": "singular", "tag": "1"},
    {"r1pos": "V", "l1pos": "D", "ending": "plural", "tag": "1"},
    {"r1pos": "N", "l1pos": "D", "ending": "plural", "tag": "1"},
    {"r1pos": "N", "l1pos": "D", "ending": "singular", "tag": "1"},
    {"r1pos": "V", "l1pos": "N", "ending": "singular", "tag": "1"},
    {"r1pos": "N", "l1pos": "D", "ending": "singular", "tag": "2"},
    {"r1pos": "V", "l1pos": "N", "ending": "plural", "tag": "2"},
    {"r1pos": "V", "l1pos": "N", "ending": "plural", "tag": "2"},
    {"r1pos": "V", "l1pos": "D", "ending": "plural", "tag": "2"},
    {"r1pos": "V", "l1pos": "N", "ending": "singular", "tag": "2"},
    {"r1pos": "N", "l1pos": "N", "ending": "plural", "tag": "2"},
    {"r1pos": "V", "l1pos": "D", "ending": "singular", "tag": "3"},
    {"r1pos": "V", "l1pos": "D", "ending": "singular", "tag": "3"},
    {"r1pos": "N", "l1pos": "D", "ending": "plural", "tag": "3"},
    {"r1pos": "V", "l1pos": "D", "ending": "plural", "tag": "3"},
    {"r1pos": "V", "l1pos": "N", "ending": "singular", "tag": "3"},
    {"r1pos": "N", "l1pos": "N", "ending": "singular", "tag": "3"},
    {"r1pos": "V", "l1pos": "D", "ending": "singular", "tag": "3"},
]


@pytest.fixture(scope="session")
def nb_fixture():
    table = build_table(NB_FIXTURE_ROWS, NB_FIXTURE_SCHEMA)
    graph = InteractionGraph(
        NB_FIXTURE_SCHEMA.names,
        [("tag", "r1pos"), ("tag", "l1pos"), ("tag", "ending")],
    )
    return NB_FIXTURE_SCHEMA, NB_FIXTURE_ROWS, table, junction_tree(graph)


def all_feature_vectors(schema, tag_var="tag"):
    """Every combination of non-tag values in the schema."""
    names = [n for n in schema.names if n != tag_var]
    vectors = [{}]
    for name in names:
        vectors = [dict(v, **{name: val}) for v in vectors for val in schema.values_of(name)]
    return vectors
