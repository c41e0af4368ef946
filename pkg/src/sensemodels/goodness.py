"""Model fit measurement and search.

Fit is measured by the likelihood-ratio statistic G2, referred to a chi-square
distribution whose degrees of freedom count the interactions the model leaves
unconstrained.  Candidate models are ranked to prefer well-fitting models with
the fewest interdependencies, demoting models whose sufficient statistics are
sparse.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np
from scipy.special import gammaincc

from .decomposable import (
    DecomposableModel,
    FittedModel,
    InteractionGraph,
    check_decomposable,
    enumerate_models,
    fit_mle,
    junction_tree,
)
from .errors import SchemaMismatchError
from .tables import ContingencyTable, VariableSchema


@dataclass(frozen=True)
class FitReport:
    g2: float
    df: int
    p_value: float
    sparse: bool
    param_count: int


def g_squared(table: ContingencyTable, fitted: FittedModel) -> float:
    """Likelihood-ratio statistic 2 * sum x * ln(x / expected) over positive cells.

    Zero observed cells contribute nothing; a positive observation falling on a
    zero or uncovered estimate yields +inf (the data lies outside the model's
    support).  When the fit came from the observed table itself the result is
    always finite and exactly 0 for the saturated model.
    """
    if table.schema != fitted.schema:
        raise SchemaMismatchError("table and fitted model have different schemas")
    if table.n == 0:
        return 0.0
    expected, covered = fitted.expected_counts()
    if fitted.n != table.n and fitted.n > 0:
        expected = expected * (table.n / fitted.n)
    pos = table.counts > 0
    if (~covered[pos]).any() or (expected[pos] <= 0).any():
        return math.inf
    x = table.counts[pos].astype(np.float64)
    return float(2.0 * np.sum(x * np.log(x / expected[pos])))


def _term_dimension(vertex_set: Iterable[str], schema: VariableSchema) -> int:
    dim = 1
    for v in vertex_set:
        dim *= len(schema.values_of(v))
    return dim - 1


def model_dimension(model: DecomposableModel, schema: VariableSchema) -> int:
    """Free parameters: clique dimensions minus separator dimensions (with multiplicity)."""
    return sum(_term_dimension(c, schema) for c in model.cliques) - sum(
        _term_dimension(s, schema) for s in model.separators
    )


def model_df(model: DecomposableModel, schema: VariableSchema) -> int:
    """Degrees of freedom: interactions unconstrained in the model, (q-1) - dim."""
    if set(model.graph.vertices) != set(schema.names):
        raise SchemaMismatchError("model variables do not match schema variables")
    return (schema.num_cells - 1) - model_dimension(model, schema)


def chi_square_sf(x: float, df: int) -> float:
    """Upper-tail chi-square probability via the regularized incomplete gamma.

    df = 0 is the degenerate point mass at zero: 1 when x == 0, else 0.
    """
    if x < 0:
        raise ValueError(f"chi-square statistic must be non-negative, got {x}")
    if df < 0:
        raise ValueError(f"degrees of freedom must be non-negative, got {df}")
    if df == 0:
        return 1.0 if x == 0 else 0.0
    return float(gammaincc(df / 2.0, x / 2.0))


def sparsity_flag(
    model: DecomposableModel, table: ContingencyTable, threshold: float = 0.20
) -> bool:
    """Flag models whose sufficient statistics are sparse.

    True when any clique marginal has more than `threshold` zero cells, or an
    expected count below 1 under the fit.  The fit preserves clique marginals
    exactly, so the expected clique counts are the observed ones.
    """
    for clique in model.cliques:
        marginal = table.marginalize(clique)
        zero_fraction = float(np.count_nonzero(marginal.counts == 0)) / marginal.counts.size
        if zero_fraction > threshold:
            return True
        if int(marginal.counts.min()) < 1:
            return True
    return False


def assess(
    model: DecomposableModel, table: ContingencyTable, sparsity_threshold: float = 0.20
) -> FitReport:
    """Fit the model and report G2, df, p-value, sparsity, and parameter count."""
    fitted = fit_mle(model, table)
    g2 = g_squared(table, fitted)
    df = model_df(model, table.schema)
    return FitReport(
        g2=g2,
        df=df,
        p_value=chi_square_sf(g2, df),
        sparse=sparsity_flag(model, table, sparsity_threshold),
        param_count=model_dimension(model, table.schema),
    )


def feature_informativeness(table: ContingencyTable, sparsity_threshold: float = 0.20) -> FitReport:
    """Fit of the independence model on a (feature, tag) table.

    The worse the fit, the more informative the feature; callers rank by
    ascending p-value (equivalently descending df-adjusted G2).
    """
    if len(table.schema.names) != 2:
        raise SchemaMismatchError(
            f"feature informativeness needs exactly 2 variables, got {len(table.schema.names)}"
        )
    model = junction_tree(InteractionGraph(table.schema.names, []))
    return assess(model, table, sparsity_threshold)


@dataclass(frozen=True)
class SearchResult:
    """Candidate models with their fit reports, best-ranked first."""

    entries: tuple[tuple[DecomposableModel, FitReport], ...]
    alpha: float

    def to_text(self) -> str:
        lines = ["edges\tg2\tdf\tp\tparams\tsparse"]
        for model, report in self.entries:
            edges = " ".join(f"{u}|{v}" for u, v in model.graph.edges) or "-"
            g2 = "inf" if math.isinf(report.g2) else f"{report.g2:.6f}"
            lines.append(
                f"{edges}\t{g2}\t{report.df}\t{report.p_value:.6e}"
                f"\t{report.param_count}\t{'yes' if report.sparse else 'no'}"
            )
        return "\n".join(lines) + "\n"


def _rank_key(model: DecomposableModel, report: FitReport, alpha: float):
    # Non-sparse first, then adequate fit, then fewest interdependencies.
    return (
        report.sparse,
        0 if report.p_value >= alpha else 1,
        report.param_count,
        -report.p_value,
        model.edge_key(),
    )


def search_models(
    table: ContingencyTable,
    strategy: str = "exhaustive",
    alpha: float = 0.05,
    sparsity_threshold: float = 0.20,
    max_vars: int = 6,
) -> SearchResult:
    """Evaluate candidate decomposable models and rank them.

    Exhaustive strategy assesses every decomposable model (d <= max_vars).
    Greedy strategy walks forward from the independence model, adding the
    decomposability-preserving edge with the largest G2 drop per degree of
    freedom spent, and stops once the fit p-value reaches alpha; every model
    assessed along the way enters the ranking.
    """
    schema = table.schema
    evaluated: dict[tuple, tuple[DecomposableModel, FitReport]] = {}

    if strategy == "exhaustive":
        for model in enumerate_models(schema, max_vars=max_vars):
            evaluated[model.edge_key()] = (model, assess(model, table, sparsity_threshold))
    elif strategy == "greedy":
        graph = InteractionGraph(schema.names, [])
        current = junction_tree(graph)
        current_report = assess(current, table, sparsity_threshold)
        evaluated[current.edge_key()] = (current, current_report)
        all_pairs = [
            (u, v) if u < v else (v, u)
            for i, u in enumerate(schema.names)
            for v in schema.names[i + 1 :]
        ]
        while current_report.p_value < alpha:
            best = None
            for u, v in sorted(set(all_pairs) - set(graph.edges)):
                cand_graph = graph.with_edge(u, v)
                ok, _ = check_decomposable(cand_graph)
                if not ok:
                    continue
                cand = junction_tree(cand_graph)
                key = cand.edge_key()
                if key in evaluated:
                    _, cand_report = evaluated[key]
                else:
                    cand_report = assess(cand, table, sparsity_threshold)
                    evaluated[key] = (cand, cand_report)
                drop = current_report.g2 - cand_report.g2
                spent = max(current_report.df - cand_report.df, 1)
                gain = drop / spent
                if best is None or gain > best[0]:
                    best = (gain, (u, v), cand, cand_report)
            if best is None:
                break  # saturated; nothing left to add
            _, _, current, current_report = best
            graph = current.graph
    else:
        raise ValueError(f"unknown search strategy {strategy!r}")

    ranked = sorted(
        evaluated.values(), key=lambda pair: _rank_key(pair[0], pair[1], alpha)
    )
    return SearchResult(entries=tuple(ranked), alpha=alpha)
