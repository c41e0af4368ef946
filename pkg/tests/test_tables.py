import numpy as np
import pytest

from sensemodels import (
    ContingencyTable,
    SchemaMismatchError,
    VariableSchema,
    build_table,
    marginalize,
    schema_from_text,
    schema_to_text,
    table_from_text,
    table_to_text,
)


def test_schema_invariants():
    with pytest.raises(SchemaMismatchError):
        VariableSchema([("a", ("0", "1")), ("a", ("0", "1"))])
    with pytest.raises(SchemaMismatchError):
        VariableSchema([("a", ("only",))])
    with pytest.raises(SchemaMismatchError):
        VariableSchema([("a", ("x", "x"))])


def test_build_table_empty_input(binary_schema_2):
    t = build_table([], binary_schema_2)
    assert t.n == 0
    assert list(t.counts) == [0, 0, 0, 0]


def test_build_table_uniform(binary_schema_2):
    rows = [{"a": x, "b": y} for x in "01" for y in "01"]
    t = build_table(rows, binary_schema_2)
    assert list(t.counts) == [1, 1, 1, 1]
    assert t.n == 4


def test_build_table_training_tag_distribution():
    # single 6-valued variable, replicated per the training tag counts
    counts = (271, 9, 50, 130, 378, 931)
    schema = VariableSchema([("tag", ("1", "2", "3", "4", "5", "6"))])
    rows = []
    for label, c in zip("123456", counts):
        rows.extend({"tag": label} for _ in range(c))
    t = build_table(rows, schema)
    assert tuple(t.counts) == counts
    assert t.n == 1769


def test_build_table_names_offender(binary_schema_2):
    with pytest.raises(SchemaMismatchError, match="'c'"):
        build_table([{"a": "0", "c": "1"}], binary_schema_2)
    with pytest.raises(SchemaMismatchError, match="'2'"):
        build_table([{"a": "0", "b": "2"}], binary_schema_2)


def test_marginalize_identity(binary_schema_2):
    t = build_table([{"a": "0", "b": "1"}] * 3, binary_schema_2)
    m = t.marginalize(["a", "b"])
    assert m == t


def test_marginalize_row_sums(binary_schema_2):
    t = ContingencyTable(binary_schema_2, [10, 0, 0, 10])
    m = marginalize(t, {"a"})
    assert list(m.counts) == [10, 10]
    assert m.n == 20


def test_marginalize_errors(binary_schema_2):
    t = ContingencyTable(binary_schema_2, [1, 2, 3, 4])
    with pytest.raises(SchemaMismatchError):
        t.marginalize([])
    with pytest.raises(SchemaMismatchError):
        t.marginalize(["nope"])


def test_marginal_total_matches_direct_summation():
    rng = np.random.default_rng(7)
    schema = VariableSchema([("a", ("0", "1", "2")), ("b", ("x", "y")), ("c", ("u", "v"))])
    t = ContingencyTable(schema, rng.integers(0, 9, schema.num_cells))
    for keep in (["a"], ["b"], ["c"], ["a", "c"], ["b", "c"], ["a", "b", "c"]):
        m = t.marginalize(keep)
        assert int(m.counts.sum()) == t.n == int(t.counts.sum())


def test_marginalize_composes():
    rng = np.random.default_rng(11)
    schema = VariableSchema(
        [("a", ("0", "1")), ("b", ("0", "1", "2")), ("c", ("0", "1")), ("d", ("0", "1"))]
    )
    t = ContingencyTable(schema, rng.integers(0, 20, schema.num_cells))
    big = t.marginalize(["a", "b", "c"])
    assert big.marginalize(["a", "c"]) == t.marginalize(["a", "c"])
    assert big.marginalize(["b"]) == t.marginalize(["b"])


def test_single_variable_marginal_matches_raw_counts(binary_schema_2):
    rng = np.random.default_rng(3)
    rows = [
        {"a": str(rng.integers(0, 2)), "b": str(rng.integers(0, 2))} for _ in range(50)
    ]
    t = build_table(rows, binary_schema_2)
    m = t.marginalize(["b"])
    for value in ("0", "1"):
        assert m.count_of({"b": value}) == sum(1 for r in rows if r["b"] == value)


def test_cell_index_round_trip():
    schema = VariableSchema([("a", ("0", "1", "2")), ("b", ("x", "y")), ("c", ("u", "v"))])
    for idx in range(schema.num_cells):
        assert schema.cell_index(schema.assignment_of(idx)) == idx


def test_counts_are_immutable(binary_schema_2):
    t = ContingencyTable(binary_schema_2, [1, 2, 3, 4])
    with pytest.raises(ValueError):
        t.counts[0] = 99


def test_serialization_round_trip(binary_schema_2):
    t = ContingencyTable(binary_schema_2, [5, 0, 2, 13])
    text = table_to_text(t)
    assert table_from_text(text) == t
    assert table_to_text(table_from_text(text)) == text
    schema_text = schema_to_text(binary_schema_2)
    assert schema_from_text(schema_text) == binary_schema_2
    with pytest.raises(SchemaMismatchError):
        schema_from_text(text)  # counts line present
    with pytest.raises(SchemaMismatchError):
        table_from_text(schema_text)  # counts line missing
