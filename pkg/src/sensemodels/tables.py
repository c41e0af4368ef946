"""Multiway count tables over discrete variables.

A schema declares an ordered list of named variables, each with an ordered
set of value labels.  A contingency table holds one non-negative integer
count per combination of values, laid out row-major over the declared
variable order (the last variable varies fastest).  Tables are immutable
after construction; marginalization returns new tables.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import SchemaMismatchError


@dataclass(frozen=True)
class VariableSchema:
    """Ordered discrete variables with enumerated value sets."""

    variables: tuple[tuple[str, tuple[str, ...]], ...]

    def __init__(self, variables: Iterable[tuple[str, Sequence[str]]]):
        canon = tuple((str(name), tuple(str(v) for v in values)) for name, values in variables)
        names = [name for name, _ in canon]
        if len(set(names)) != len(names):
            raise SchemaMismatchError(f"duplicate variable names in schema: {names}")
        for name, values in canon:
            if len(values) < 2:
                raise SchemaMismatchError(f"variable {name!r} needs at least 2 values, got {len(values)}")
            if len(set(values)) != len(values):
                raise SchemaMismatchError(f"variable {name!r} has duplicate value labels")
        object.__setattr__(self, "variables", canon)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.variables)

    @property
    def cardinalities(self) -> tuple[int, ...]:
        return tuple(len(values) for _, values in self.variables)

    @property
    def num_cells(self) -> int:
        q = 1
        for c in self.cardinalities:
            q *= c
        return q

    def values_of(self, name: str) -> tuple[str, ...]:
        for n, values in self.variables:
            if n == name:
                return values
        raise SchemaMismatchError(f"unknown variable {name!r}")

    def value_index(self, name: str, value: str) -> int:
        values = self.values_of(name)
        try:
            return values.index(value)
        except ValueError:
            raise SchemaMismatchError(
                f"unknown value {value!r} for variable {name!r} (declared: {list(values)})"
            ) from None

    def cell_index(self, assignment: Mapping[str, str]) -> int:
        """Map a full assignment to its row-major cell index."""
        extra = [n for n in assignment if n not in self.names]
        if extra:
            raise SchemaMismatchError(f"assignment names unknown variables: {extra}")
        missing = [n for n in self.names if n not in assignment]
        if missing:
            raise SchemaMismatchError(f"assignment missing variables: {missing}")
        idx = 0
        for name, values in self.variables:
            idx = idx * len(values) + self.value_index(name, assignment[name])
        return idx

    def assignment_of(self, index: int) -> dict[str, str]:
        """Inverse of cell_index."""
        if not 0 <= index < self.num_cells:
            raise SchemaMismatchError(f"cell index {index} out of range [0, {self.num_cells})")
        out: dict[str, str] = {}
        for name, values in reversed(self.variables):
            index, j = divmod(index, len(values))
            out[name] = values[j]
        return out

    def restrict(self, keep: Iterable[str]) -> "VariableSchema":
        """Schema over a subset of variables, preserving declared order."""
        keep_set = set(keep)
        unknown = keep_set - set(self.names)
        if unknown:
            raise SchemaMismatchError(f"unknown variables: {sorted(unknown)}")
        if not keep_set:
            raise SchemaMismatchError("keep-set must be non-empty")
        return VariableSchema([(n, v) for n, v in self.variables if n in keep_set])


class ContingencyTable:
    """Immutable q-dimensional count vector over a schema, with total N."""

    __slots__ = ("schema", "counts", "n")

    def __init__(self, schema: VariableSchema, counts):
        arr = np.asarray(counts, dtype=np.int64).reshape(-1)
        if arr.size != schema.num_cells:
            raise SchemaMismatchError(
                f"count vector has {arr.size} cells, schema declares {schema.num_cells}"
            )
        if (arr < 0).any():
            raise SchemaMismatchError("counts must be non-negative")
        arr = arr.copy()
        arr.flags.writeable = False
        self.schema = schema
        self.counts = arr
        self.n = int(arr.sum())

    def __eq__(self, other):
        if not isinstance(other, ContingencyTable):
            return NotImplemented
        return self.schema == other.schema and bool((self.counts == other.counts).all())

    def __repr__(self):
        return f"ContingencyTable(vars={list(self.schema.names)}, N={self.n})"

    def count_of(self, assignment: Mapping[str, str]) -> int:
        return int(self.counts[self.schema.cell_index(assignment)])

    def as_array(self) -> np.ndarray:
        """Counts reshaped to one axis per variable, declared order."""
        return self.counts.reshape(self.schema.cardinalities)

    def marginalize(self, keep: Iterable[str]) -> "ContingencyTable":
        """Sum out all variables not in `keep`; N is preserved."""
        sub = self.schema.restrict(keep)
        drop_axes = tuple(
            i for i, name in enumerate(self.schema.names) if name not in sub.names
        )
        arr = self.as_array()
        if drop_axes:
            arr = arr.sum(axis=drop_axes)
        return ContingencyTable(sub, arr.reshape(-1))


def build_table(instances: Sequence[Mapping[str, str]], schema: VariableSchema) -> ContingencyTable:
    """Count full assignments into a table; every instance must cover every variable."""
    counts = np.zeros(schema.num_cells, dtype=np.int64)
    for inst in instances:
        counts[schema.cell_index(inst)] += 1
    return ContingencyTable(schema, counts)


def marginalize(table: ContingencyTable, keep: Iterable[str]) -> ContingencyTable:
    return table.marginalize(keep)


# Serialization: schema block (one `variable` line per variable, names then
# value labels in declared order) followed by one `counts` line with the flat
# row-major vector.  Whitespace-delimited; labels may not contain whitespace.

def _check_token(label: str, what: str) -> str:
    if label != label.strip() or any(ch.isspace() for ch in label) or not label:
        raise SchemaMismatchError(f"{what} {label!r} must be non-empty and contain no whitespace")
    return label


def schema_to_text(schema: VariableSchema) -> str:
    lines = []
    for name, values in schema.variables:
        _check_token(name, "variable name")
        for v in values:
            _check_token(v, "value label")
        lines.append("variable " + name + " " + " ".join(values))
    return "\n".join(lines) + "\n"


def table_to_text(table: ContingencyTable) -> str:
    return schema_to_text(table.schema) + "counts " + " ".join(str(c) for c in table.counts) + "\n"


def schema_from_text(text: str) -> VariableSchema:
    schema, counts = _parse_table_text(text)
    if counts is not None:
        raise SchemaMismatchError("expected a bare schema, found a counts line")
    return schema


def table_from_text(text: str) -> ContingencyTable:
    schema, counts = _parse_table_text(text)
    if counts is None:
        raise SchemaMismatchError("missing counts line")
    return ContingencyTable(schema, counts)


def _parse_table_text(text: str):
    variables: list[tuple[str, tuple[str, ...]]] = []
    counts = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split()
        kind, rest = fields[0], fields[1:]
        if kind == "variable":
            if len(rest) < 3:
                raise SchemaMismatchError(
                    f"line {lineno}: variable needs a name and at least 2 values"
                )
            variables.append((rest[0], tuple(rest[1:])))
        elif kind == "counts":
            if counts is not None:
                raise SchemaMismatchError(f"line {lineno}: duplicate counts line")
            try:
                counts = [int(tok) for tok in rest]
            except ValueError:
                raise SchemaMismatchError(f"line {lineno}: counts must be integers") from None
        else:
            raise SchemaMismatchError(f"line {lineno}: unknown field {kind!r}")
    if not variables:
        raise SchemaMismatchError("no variable lines found")
    return VariableSchema(variables), counts
