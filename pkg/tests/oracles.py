"""Independent reference implementations used only to check the package.

Nothing here may call into the code paths under test: fits go through
iterative proportional fitting, tail probabilities through quadrature,
chordality through networkx, and classification through a hand-rolled
Naive Bayes.
"""

from __future__ import annotations

import math
from collections import Counter

import networkx as nx
import numpy as np
from scipy.integrate import quad


def ipf_fit(observed: np.ndarray, clique_axes: list[tuple[int, ...]],
            tol: float = 1e-12, max_iter: int = 20000) -> np.ndarray:
    """Iterative proportional fitting of cell counts to the clique marginals.

    `observed` is the d-dimensional count array; `clique_axes` lists each
    clique as a tuple of axis indices.  Returns estimated cell counts.
    """
    observed = np.asarray(observed, dtype=np.float64)
    n = observed.sum()
    d = observed.ndim
    if n == 0:
        return np.zeros_like(observed)
    est = np.full(observed.shape, n / observed.size)
    targets = []
    for axes in clique_axes:
        other = tuple(i for i in range(d) if i not in axes)
        targets.append((other, observed.sum(axis=other, keepdims=True)))
    for _ in range(max_iter):
        max_change = 0.0
        for other, target in targets:
            current = est.sum(axis=other, keepdims=True)
            ratio = np.divide(target, current, out=np.zeros_like(target), where=current > 0)
            new = est * ratio
            max_change = max(max_change, float(np.abs(new - est).max()))
            est = new
        if max_change < tol:
            break
    return est


def chi2_sf_quad(x: float, df: int) -> float:
    """Upper-tail chi-square probability by adaptive quadrature of the density."""
    half = df / 2.0
    log_norm = half * math.log(2.0) + math.lgamma(half)

    def pdf(t: float) -> float:
        if t <= 0:
            return 0.0
        return math.exp((half - 1.0) * math.log(t) - t / 2.0 - log_norm)

    value, _ = quad(pdf, x, np.inf, epsabs=1e-13, epsrel=1e-13, limit=500)
    return value


def is_chordal_nx(vertices, edges) -> bool:
    g = nx.Graph()
    g.add_nodes_from(vertices)
    g.add_edges_from(edges)
    return nx.is_chordal(g)


def count_chordal_graphs(d: int) -> int:
    """Brute force over all 2^C(d,2) labeled graphs."""
    names = [f"v{i}" for i in range(d)]
    pairs = [(names[i], names[j]) for i in range(d) for j in range(i + 1, d)]
    total = 0
    for mask in range(1 << len(pairs)):
        edges = [pairs[i] for i in range(len(pairs)) if mask >> i & 1]
        if is_chordal_nx(names, edges):
            total += 1
    return total


class NaiveBayesOracle:
    """P(tag) times the product of P(feature | tag), straight from counts."""

    def __init__(self, rows, feature_names, tag_var="tag"):
        self.feature_names = list(feature_names)
        self.tag_var = tag_var
        self.n = len(rows)
        self.tag_counts: Counter = Counter(r[tag_var] for r in rows)
        self.pair_counts: dict[str, Counter] = {f: Counter() for f in self.feature_names}
        for r in rows:
            for f in self.feature_names:
                self.pair_counts[f][(r[f], r[tag_var])] += 1

    def joint(self, features, sense):
        nt = self.tag_counts.get(sense, 0)
        if nt == 0:
            return None  # no estimate for an unseen sense
        p = nt / self.n
        for f in self.feature_names:
            p *= self.pair_counts[f][(features[f], sense)] / nt
        return p

    def classify(self, features, senses):
        scored = []
        for s in senses:
            p = self.joint(features, s)
            if p is not None and p > 0:
                scored.append((s, p))
        if not scored:
            return None, None
        return min(scored, key=lambda sp: (-sp[1], -self.tag_counts[sp[0]], sp[0]))


def majority_by_feature_vector(rows, feature_names, tag_var="tag"):
    """Brute-force grouping: per feature vector, the majority gold sense.

    Ties break by the larger global sense count, then the smaller label,
    mirroring the classifier's tie rule.
    """
    global_counts = Counter(r[tag_var] for r in rows)
    groups: dict[tuple, Counter] = {}
    for r in rows:
        key = tuple(r[f] for f in feature_names)
        groups.setdefault(key, Counter())[r[tag_var]] += 1
    out = {}
    for key, counts in groups.items():
        out[key] = min(counts, key=lambda s: (-counts[s], -global_counts[s], s))
    return out
