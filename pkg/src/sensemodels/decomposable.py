"""Decomposable models as chordal interaction graphs.

A model is represented by its chordal graph, reduced to maximal cliques and
junction-tree separators.  Fitting is closed form: the estimated joint is the
product of clique marginal tables divided by separator marginal tables, so no
iteration is ever performed.  Cells whose separator counts are all zero are
reported as uncovered (the 0/0 case) rather than given a value.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Iterator, Mapping

import numpy as np

from .errors import CapabilityError, ConfigError, DecomposabilityError, SchemaMismatchError
from .tables import ContingencyTable, VariableSchema


class Uncovered:
    """Singleton marker for cells the fitted parameters cannot estimate (0/0)."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "UNCOVERED"


UNCOVERED = Uncovered()


@dataclass(frozen=True)
class InteractionGraph:
    """Undirected graph over variable names; edges stored as sorted pairs."""

    vertices: tuple[str, ...]
    edges: tuple[tuple[str, str], ...]

    def __init__(self, vertices: Iterable[str], edges: Iterable[tuple[str, str]] = ()):
        verts = tuple(str(v) for v in vertices)
        if len(set(verts)) != len(verts):
            raise SchemaMismatchError(f"duplicate vertices: {verts}")
        vset = set(verts)
        canon = set()
        for u, v in edges:
            if u == v:
                raise SchemaMismatchError(f"self-loop on {u!r}")
            if u not in vset or v not in vset:
                raise SchemaMismatchError(f"edge ({u!r}, {v!r}) references undeclared vertices")
            canon.add((u, v) if u < v else (v, u))
        object.__setattr__(self, "vertices", verts)
        object.__setattr__(self, "edges", tuple(sorted(canon)))

    def neighbors(self) -> dict[str, set[str]]:
        nbrs: dict[str, set[str]] = {v: set() for v in self.vertices}
        for u, v in self.edges:
            nbrs[u].add(v)
            nbrs[v].add(u)
        return nbrs

    def with_edge(self, u: str, v: str) -> "InteractionGraph":
        return InteractionGraph(self.vertices, self.edges + ((u, v),))


@dataclass(frozen=True)
class DecomposableModel:
    """Chordal graph with its maximal cliques and junction-tree separators.

    `separators` carries multiplicity: one entry per junction-tree edge, and
    `tree_edges[i]` names the pair of clique indices that separator i joins.
    """

    graph: InteractionGraph
    cliques: tuple[tuple[str, ...], ...]
    separators: tuple[tuple[str, ...], ...]
    elimination_order: tuple[str, ...]
    tree_edges: tuple[tuple[int, int], ...]

    @property
    def num_components(self) -> int:
        return len(self.cliques) - len(self.separators)

    def edge_key(self) -> tuple[tuple[str, str], ...]:
        return self.graph.edges


def _mcs_visit_order(graph: InteractionGraph, start: str | None = None) -> list[str]:
    """Maximum-cardinality search visit order, lexicographic tie-breaking.

    When `start` is given it is visited first, which makes it the last vertex
    of the derived perfect elimination ordering.
    """
    nbrs = graph.neighbors()
    unvisited = set(graph.vertices)
    weight = {v: 0 for v in unvisited}
    order: list[str] = []
    while unvisited:
        if not order and start is not None:
            v = start
        else:
            v = min(unvisited, key=lambda u: (-weight[u], u))
        order.append(v)
        unvisited.remove(v)
        for w in nbrs[v]:
            if w in unvisited:
                weight[w] += 1
    return order


def _is_peo(graph: InteractionGraph, visit_order: list[str]) -> bool:
    """True iff the reverse of `visit_order` is a perfect elimination ordering."""
    pos = {v: i for i, v in enumerate(visit_order)}
    nbrs = graph.neighbors()
    for v in visit_order:
        earlier = [u for u in nbrs[v] if pos[u] < pos[v]]
        if not earlier:
            continue
        anchor = max(earlier, key=lambda u: pos[u])
        if not set(earlier) - {anchor} <= nbrs[anchor]:
            return False
    return True


def check_decomposable(graph: InteractionGraph) -> tuple[bool, tuple[str, ...] | None]:
    """Chordality test; on success also returns a perfect elimination ordering."""
    visit = _mcs_visit_order(graph)
    if _is_peo(graph, visit):
        return True, tuple(reversed(visit))
    return False, None


def junction_tree(graph: InteractionGraph) -> DecomposableModel:
    """Reduce a chordal graph to maximal cliques and a junction forest.

    Cliques are read off the maximum-cardinality search ordering and joined by
    a maximum-weight spanning forest over intersection sizes, which satisfies
    the running-intersection property.  All ties break lexicographically, so
    the output is deterministic for a given graph.
    """
    ok, elim = check_decomposable(graph)
    if not ok:
        raise DecomposabilityError(f"graph is not chordal: edges={list(graph.edges)}")
    visit = list(reversed(elim))
    pos = {v: i for i, v in enumerate(visit)}
    nbrs = graph.neighbors()

    candidates: list[frozenset[str]] = []
    for v in visit:
        clique = frozenset({v} | {u for u in nbrs[v] if pos[u] < pos[v]})
        candidates.append(clique)
    unique = set(candidates)
    maximal = [c for c in unique if not any(c < d for d in unique)]
    cliques = tuple(sorted(tuple(sorted(c)) for c in maximal))

    # Kruskal over clique pairs, heaviest intersections first.
    pair_weights = []
    for i, j in combinations(range(len(cliques)), 2):
        w = len(set(cliques[i]) & set(cliques[j]))
        if w > 0:
            pair_weights.append((-w, i, j))
    pair_weights.sort()

    parent = list(range(len(cliques)))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    separators: list[tuple[str, ...]] = []
    tree_edges: list[tuple[int, int]] = []
    for negw, i, j in pair_weights:
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[ri] = rj
            separators.append(tuple(sorted(set(cliques[i]) & set(cliques[j]))))
            tree_edges.append((i, j))

    return DecomposableModel(
        graph=graph,
        cliques=cliques,
        separators=tuple(separators),
        elimination_order=elim,
        tree_edges=tuple(tree_edges),
    )


def enumerate_models(schema: VariableSchema, max_vars: int = 6) -> Iterator[DecomposableModel]:
    """Yield every decomposable model over the schema's variables exactly once.

    Walks all 2^C(d,2) labeled graphs in a fixed order and keeps the chordal
    ones, so the stream is deterministic.  Refuses d > max_vars.
    """
    names = schema.names
    d = len(names)
    if d > max_vars:
        raise CapabilityError(
            f"exhaustive enumeration over {d} variables exceeds the cap of {max_vars}; "
            "use the greedy search strategy instead"
        )
    candidate_edges = sorted((u, v) if u < v else (v, u) for u, v in combinations(names, 2))
    m = len(candidate_edges)
    for mask in range(1 << m):
        edges = [candidate_edges[i] for i in range(m) if mask >> i & 1]
        graph = InteractionGraph(names, edges)
        ok, _ = check_decomposable(graph)
        if ok:
            yield junction_tree(graph)


class FittedModel:
    """Clique and separator marginal tables of a model fitted to one data table."""

    def __init__(
        self,
        model: DecomposableModel,
        schema: VariableSchema,
        clique_tables: tuple[ContingencyTable, ...],
        separator_tables: tuple[ContingencyTable, ...],
        n: int,
    ):
        self.model = model
        self.schema = schema
        self.clique_tables = clique_tables
        self.separator_tables = separator_tables
        self.n = n
        self._expected = None

    def _broadcast(self, marginal: ContingencyTable) -> np.ndarray:
        member = set(marginal.schema.names)
        view = tuple(
            card if name in member else 1
            for name, card in zip(self.schema.names, self.schema.cardinalities)
        )
        return marginal.counts.reshape(view).astype(np.float64)

    def expected_counts(self) -> tuple[np.ndarray, np.ndarray]:
        """Estimated cell counts and the covered mask, flat row-major.

        Uncovered cells (a required separator count of zero, or N == 0) get an
        expected count of 0 and a False mask entry.
        """
        if self._expected is not None:
            return self._expected
        q = self.schema.num_cells
        if self.n == 0:
            self._expected = (np.zeros(q), np.zeros(q, dtype=bool))
            return self._expected
        shape = self.schema.cardinalities
        num = np.ones(shape)
        for ct in self.clique_tables:
            num = num * self._broadcast(ct)
        den = np.ones(shape)
        for st in self.separator_tables:
            den = den * self._broadcast(st)
        covered = den > 0
        scale = float(self.n) ** (self.model.num_components - 1)
        est = np.zeros(shape)
        np.divide(num, den * scale, out=est, where=covered)
        return_value = (est.reshape(-1), covered.reshape(-1))
        self._expected = return_value
        return return_value

    def tag_marginal(self, variable: str) -> ContingencyTable:
        """Single-variable marginal, read from any clique containing `variable`."""
        for ct in self.clique_tables:
            if variable in ct.schema.names:
                return ct.marginalize([variable])
        raise SchemaMismatchError(f"variable {variable!r} not in model")


def fit_mle(model: DecomposableModel, table: ContingencyTable) -> FittedModel:
    """Closed-form maximum likelihood fit: marginalize onto cliques and separators."""
    if set(model.graph.vertices) != set(table.schema.names):
        raise SchemaMismatchError(
            f"model variables {sorted(model.graph.vertices)} do not match "
            f"table variables {sorted(table.schema.names)}"
        )
    clique_tables = tuple(table.marginalize(c) for c in model.cliques)
    separator_tables = tuple(table.marginalize(s) for s in model.separators)
    return FittedModel(model, table.schema, clique_tables, separator_tables, table.n)


def estimate_cell(fitted: FittedModel, cell: Mapping[str, str]):
    """Estimated probability of one full cell, or UNCOVERED.

    The estimate is the product of clique marginal counts over the product of
    separator marginal counts, normalized by N once per connected component.
    A zero separator count makes the cell uncovered; a zero clique count with
    all separators positive gives probability 0.
    """
    idx = fitted.schema.cell_index(dict(cell))  # validates coverage of all variables
    del idx
    if fitted.n == 0:
        return UNCOVERED
    den = 1
    for st in fitted.separator_tables:
        c = st.count_of({v: cell[v] for v in st.schema.names})
        if c == 0:
            return UNCOVERED
        den *= c
    num = 1
    for ct in fitted.clique_tables:
        c = ct.count_of({v: cell[v] for v in ct.schema.names})
        if c == 0:
            return 0.0
        num *= c
    return num / (den * fitted.n ** fitted.model.num_components)


def _quote(name: str) -> str:
    return '"' + name.replace("\\", "\\\\").replace('"', '\\"') + '"'


def export_markov_dot(model: DecomposableModel) -> str:
    """Undirected DOT view of the interaction graph (conditional independence)."""
    lines = ["graph interactions {"]
    for v in sorted(model.graph.vertices):
        lines.append(f"  {_quote(v)};")
    for u, v in sorted(model.graph.edges):
        lines.append(f"  {_quote(u)} -- {_quote(v)};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def export_bayes_dot(model: DecomposableModel, root: str = "tag") -> str:
    """Directed DOT view with `root` as the ancestor of every other variable.

    Edges are oriented against a perfect elimination ordering that eliminates
    `root` last, i.e. from earlier-visited to later-visited vertices of a
    maximum-cardinality search started at `root`.
    """
    if root not in model.graph.vertices:
        raise ConfigError(f"model has no variable named {root!r} to use as the root")
    visit = _mcs_visit_order(model.graph, start=root)
    pos = {v: i for i, v in enumerate(visit)}
    lines = ["digraph influences {"]
    for v in sorted(model.graph.vertices):
        lines.append(f"  {_quote(v)};")
    directed = sorted(
        (u, v) if pos[u] < pos[v] else (v, u) for u, v in model.graph.edges
    )
    for u, v in directed:
        lines.append(f"  {_quote(u)} -> {_quote(v)};")
    lines.append("}")
    return "\n".join(lines) + "\n"


# Model files: a `variables` line (ordered), one `edge` line per pair, and
# optional derived `clique` lines that are ignored on parse.

def model_to_text(model: DecomposableModel) -> str:
    lines = ["variables " + " ".join(model.graph.vertices)]
    for u, v in model.graph.edges:
        lines.append(f"edge {u} {v}")
    for c in model.cliques:
        lines.append("clique " + " ".join(c))
    return "\n".join(lines) + "\n"


def graph_from_text(text: str) -> InteractionGraph:
    vertices: tuple[str, ...] | None = None
    edges: list[tuple[str, str]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split()
        kind, rest = fields[0], fields[1:]
        if kind == "variables":
            if vertices is not None:
                raise SchemaMismatchError(f"line {lineno}: duplicate variables line")
            if not rest:
                raise SchemaMismatchError(f"line {lineno}: variables line is empty")
            vertices = tuple(rest)
        elif kind == "edge":
            if len(rest) != 2:
                raise SchemaMismatchError(f"line {lineno}: edge needs exactly 2 vertices")
            edges.append((rest[0], rest[1]))
        elif kind == "clique":
            continue  # derived, informational only
        else:
            raise SchemaMismatchError(f"line {lineno}: unknown field {kind!r}")
    if vertices is None:
        raise SchemaMismatchError("model file has no variables line")
    return InteractionGraph(vertices, edges)


def model_from_text(text: str) -> DecomposableModel:
    return junction_tree(graph_from_text(text))
