"""Corpus parsing, instance collection, train/test splitting, and synthesis.

Corpus format: UTF-8, LF line endings, one sentence per line, `#` starts a
comment line.  Tokens are separated by single spaces; each token is
`form|POS` or `form|POS|sense=<label>`; `|` is forbidden inside fields and
there is no escaping.

All randomness flows through a seeded xoshiro256** generator (a 64-bit
xorshift-family generator) whose state is initialized with splitmix64, so
splits and synthetic samples are reproducible from a decimal 64-bit seed.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .decomposable import FittedModel, _mcs_visit_order
from .errors import CorpusParseError, SchemaMismatchError
from .features import InstanceRecord

_MASK64 = (1 << 64) - 1


def _splitmix64(state: int) -> tuple[int, int]:
    state = (state + 0x9E3779B97F4A7C15) & _MASK64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return state, z ^ (z >> 31)


def _rotl(x: int, k: int) -> int:
    return ((x << k) | (x >> (64 - k))) & _MASK64


class Xoshiro256StarStar:
    """Deterministic 64-bit generator; state seeded via splitmix64."""

    def __init__(self, seed: int):
        state = seed & _MASK64
        s = []
        for _ in range(4):
            state, word = _splitmix64(state)
            s.append(word)
        self._s = s

    def next_u64(self) -> int:
        s0, s1, s2, s3 = self._s
        result = (_rotl((s1 * 5) & _MASK64, 7) * 9) & _MASK64
        t = (s1 << 17) & _MASK64
        s2 ^= s0
        s3 ^= s1
        s1 ^= s2
        s0 ^= s3
        s2 ^= t
        s3 = _rotl(s3, 45)
        self._s = [s0, s1, s2, s3]
        return result

    def randrange(self, n: int) -> int:
        if n <= 0:
            raise ValueError(f"randrange needs n >= 1, got {n}")
        return self.next_u64() % n


@dataclass(frozen=True)
class TaggedSentence:
    """Tokens of one sentence: (form, POS, optional sense annotation)."""

    tokens: tuple[tuple[str, str, str | None], ...]


@dataclass(frozen=True)
class Dataset:
    instances: tuple[InstanceRecord, ...]
    provenance: str
    skipped_unannotated: int = 0

    def __len__(self) -> int:
        return len(self.instances)

    def senses(self) -> tuple[str, ...]:
        return tuple(sorted({inst.sense for inst in self.instances if inst.sense is not None}))


def parse_corpus(text: str) -> list[TaggedSentence]:
    """One TaggedSentence per non-empty, non-comment line."""
    sentences = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        if not raw.strip() or raw.lstrip().startswith("#"):
            continue
        tokens: list[tuple[str, str, str | None]] = []
        column = 1
        for tok in raw.split(" "):
            if not tok:
                raise CorpusParseError("empty token (double space?)", lineno, column)
            fields = tok.split("|")
            if len(fields) == 2:
                form, pos, sense = fields[0], fields[1], None
            elif len(fields) == 3:
                form, pos, annot = fields
                if not annot.startswith("sense="):
                    raise CorpusParseError(
                        f"third field must be sense=<label>, got {annot!r}", lineno, column
                    )
                sense = annot[len("sense="):]
                if not sense:
                    raise CorpusParseError("empty sense label", lineno, column)
            elif len(fields) > 3 and all(f.startswith("sense=") for f in fields[2:]):
                raise CorpusParseError("duplicate sense annotation on one token", lineno, column)
            else:
                raise CorpusParseError(f"malformed token {tok!r}", lineno, column)
            if not form or not pos:
                raise CorpusParseError(f"token {tok!r} has an empty form or POS", lineno, column)
            tokens.append((form, pos, sense))
            column += len(tok) + 1
        sentences.append(TaggedSentence(tuple(tokens)))
    return sentences


def serialize_corpus(sentences: Iterable[TaggedSentence]) -> str:
    lines = []
    for sentence in sentences:
        parts = []
        for form, pos, sense in sentence.tokens:
            if any("|" in f for f in (form, pos, sense or "")):
                raise CorpusParseError("'|' is forbidden inside fields", 0, 0)
            parts.append(f"{form}|{pos}" + (f"|sense={sense}" if sense is not None else ""))
        lines.append(" ".join(parts))
    return "\n".join(lines) + "\n"


def collect_instances(
    sentences: Sequence[TaggedSentence],
    target_forms: Iterable[str],
    noun_tags: Iterable[str],
    provenance: str = "<memory>",
) -> Dataset:
    """One instance per sentence holding an annotated, noun-tagged target token.

    Only the first qualifying occurrence per sentence counts; noun-tagged
    target occurrences without a sense annotation are tallied and skipped.
    """
    targets = {f.lower() for f in target_forms}
    if not targets:
        raise SchemaMismatchError("target forms must be non-empty")
    nouns = set(noun_tags)
    instances: list[InstanceRecord] = []
    skipped = 0
    for sentence in sentences:
        chosen = None
        for i, (form, pos, sense) in enumerate(sentence.tokens):
            if form.lower() in targets and pos in nouns:
                if sense is None:
                    skipped += 1
                elif chosen is None:
                    chosen = (i, sense)
        if chosen is not None:
            i, sense = chosen
            instances.append(
                InstanceRecord(
                    tokens=tuple((form, pos) for form, pos, _ in sentence.tokens),
                    target_index=i,
                    sense=sense,
                    ident=len(instances),
                )
            )
    return Dataset(tuple(instances), provenance, skipped)


def split(dataset: Dataset, n_test: int, seed: int) -> tuple[Dataset, Dataset]:
    """Seeded uniform sample without replacement; train is the complement in order."""
    n = len(dataset.instances)
    if not 0 <= n_test < n:
        raise SchemaMismatchError(f"n_test must be in [0, {n}), got {n_test}")
    rng = Xoshiro256StarStar(seed)
    indices = list(range(n))
    for i in range(n_test):
        j = i + rng.randrange(n - i)
        indices[i], indices[j] = indices[j], indices[i]
    test_ids = sorted(indices[:n_test])
    test_set = set(test_ids)
    train = tuple(inst for i, inst in enumerate(dataset.instances) if i not in test_set)
    test = tuple(dataset.instances[i] for i in test_ids)
    meta = f"{dataset.provenance} [split seed={seed} n_test={n_test}]"
    return (
        Dataset(train, meta + " train", dataset.skipped_unannotated),
        Dataset(test, meta + " test"),
    )


def synthesize(
    fitted: FittedModel, n: int, seed: int, root: str | None = None
) -> list[dict[str, str]]:
    """Draw n independent full assignments from the fitted model's joint.

    Sampling is ancestral along the directed (Bayesian-network) orientation of
    the model: each variable is drawn given its parents from the corresponding
    clique marginal, using exact integer count weights.  Requires a proper
    joint: positive N and no zero separator counts anywhere.
    """
    if fitted.n <= 0:
        raise SchemaMismatchError("cannot sample from a fit with N = 0")
    for st in fitted.separator_tables:
        if int(st.counts.min()) == 0:
            raise SchemaMismatchError(
                f"improper joint: separator {st.schema.names} has a zero count"
            )
    graph = fitted.model.graph
    if root is None and "tag" in graph.vertices:
        root = "tag"
    if root is not None and root not in graph.vertices:
        raise SchemaMismatchError(f"no variable named {root!r} to use as the sampling root")
    visit = _mcs_visit_order(graph, start=root)
    pos = {v: i for i, v in enumerate(visit)}
    nbrs = graph.neighbors()

    # Each family {v} + parents is a clique subset, so one marginal table
    # serves; weights are tabulated per parent combination up front.
    plans = []
    for v in visit:
        parents = tuple(sorted(u for u in nbrs[v] if pos[u] < pos[v]))
        family = set(parents) | {v}
        clique_table = next(
            ct for ct in fitted.clique_tables if family <= set(ct.schema.names)
        )
        marginal = clique_table.marginalize(family)
        values = marginal.schema.values_of(v)
        weights: dict[tuple[str, ...], list[int]] = {}
        for idx in range(marginal.schema.num_cells):
            cell = marginal.schema.assignment_of(idx)
            key = tuple(cell[p] for p in parents)
            per_value = weights.setdefault(key, [0] * len(values))
            per_value[values.index(cell[v])] += int(marginal.counts[idx])
        plans.append((v, parents, values, weights))

    rng = Xoshiro256StarStar(seed)
    draws: list[dict[str, str]] = []
    for _ in range(n):
        row: dict[str, str] = {}
        for v, parents, values, weights in plans:
            per_value = weights[tuple(row[p] for p in parents)]
            total = sum(per_value)
            if total == 0:
                raise SchemaMismatchError(f"improper joint: zero mass for parents of {v!r}")
            r = rng.randrange(total)
            acc = 0
            for value, w in zip(values, per_value):
                acc += w
                if r < acc:
                    row[v] = value
                    break
        draws.append(row)
    return draws
