"""Contextual features for occurrences of a target word.

Three feature families: a dichotomous morphological ending (singular vs
plural form of the target), part-of-speech tags of a window around the
target collapsed to coarse classes, and presence/absence of selected
collocation spelling forms in the same sentence.  Collocations are chosen
from the most frequent candidate forms by how poorly each one fits an
independence-with-the-sense model: the worse the fit, the more informative.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .errors import SchemaMismatchError
from .goodness import FitReport, feature_informativeness
from .tables import VariableSchema, build_table

BOUNDARY = "#BOUNDARY#"
ABSENT = "absent"
PRESENT = "present"
SINGULAR = "singular"
PLURAL = "plural"
TAG = "tag"


@dataclass(frozen=True)
class FeatureSpec:
    """Which features to extract and how."""

    target_lemma: str
    use_ending: bool = True
    pos_offsets: tuple[int, ...] = (-2, -1, 1, 2)
    collocation_forms: tuple[str, ...] = ()
    pos_collapse_map: Mapping[str, str] | None = None
    plural_forms: tuple[str, ...] = ()

    def __post_init__(self):
        lemma = self.target_lemma.lower()
        object.__setattr__(self, "target_lemma", lemma)
        offsets = tuple(int(o) for o in self.pos_offsets)
        if 0 in offsets:
            raise SchemaMismatchError("POS offsets must be non-zero")
        if len(set(offsets)) != len(offsets):
            raise SchemaMismatchError(f"duplicate POS offsets: {offsets}")
        object.__setattr__(self, "pos_offsets", offsets)
        plural = tuple(f.lower() for f in self.plural_forms) or (lemma + "s",)
        object.__setattr__(self, "plural_forms", plural)
        collocs = tuple(f.lower() for f in self.collocation_forms)
        if len(set(collocs)) != len(collocs):
            raise SchemaMismatchError(f"duplicate collocation forms: {collocs}")
        banned = set(plural) | {lemma}
        clash = [f for f in collocs if f in banned]
        if clash:
            raise SchemaMismatchError(f"collocation forms may not be target forms: {clash}")
        object.__setattr__(self, "collocation_forms", collocs)

    @property
    def target_word_forms(self) -> frozenset[str]:
        return frozenset(self.plural_forms) | {self.target_lemma}


@dataclass(frozen=True)
class InstanceRecord:
    """One usage of the target word: a tagged sentence plus the target position."""

    tokens: tuple[tuple[str, str], ...]
    target_index: int
    sense: str | None = None
    ident: int = -1

    def __post_init__(self):
        if not 0 <= self.target_index < len(self.tokens):
            raise SchemaMismatchError(
                f"target index {self.target_index} out of range for {len(self.tokens)} tokens"
            )

    @property
    def target_form(self) -> str:
        return self.tokens[self.target_index][0]


def extract_ending(instance: InstanceRecord, spec: FeatureSpec) -> str:
    """`plural` iff the lowercased target form ends in a configured plural form."""
    form = instance.target_form.lower()
    return PLURAL if any(form.endswith(p) for p in spec.plural_forms) else SINGULAR


def pos_variable_name(offset: int) -> str:
    return f"l{-offset}pos" if offset < 0 else f"r{offset}pos"


def extract_pos(instance: InstanceRecord, offset: int, spec: FeatureSpec) -> str:
    """Collapsed POS class of the token `offset` positions from the target.

    Positions beyond the sentence yield the reserved BOUNDARY label.  The
    collapse map, when given, overrides the first-letter default per tag.
    """
    if offset == 0:
        raise SchemaMismatchError("offset must be non-zero")
    i = instance.target_index + offset
    if not 0 <= i < len(instance.tokens):
        return BOUNDARY
    tag = instance.tokens[i][1]
    if spec.pos_collapse_map is not None and tag in spec.pos_collapse_map:
        return spec.pos_collapse_map[tag]
    return tag[0]


def _sentence_forms(instance: InstanceRecord) -> set[str]:
    return {form.lower() for form, _ in instance.tokens}


def candidate_collocations(
    instances: Sequence[InstanceRecord], k: int = 400, exclude: Iterable[str] = ()
) -> list[str]:
    """The k most frequent lowercased token forms across the instances' sentences.

    The target word's own forms are excluded; frequency ties break
    lexicographically.
    """
    if k < 1:
        raise SchemaMismatchError(f"k must be >= 1, got {k}")
    banned = {f.lower() for f in exclude}
    freq: Counter = Counter()
    for inst in instances:
        for form, _ in inst.tokens:
            low = form.lower()
            if low not in banned:
                freq[low] += 1
    return [form for form, _ in sorted(freq.items(), key=lambda kv: (-kv[1], kv[0]))][:k]


def score_collocations(
    instances: Sequence[InstanceRecord],
    candidates: Sequence[str],
    senses: Sequence[str] | None = None,
) -> list[tuple[str, FitReport]]:
    """Informativeness of each candidate form, most informative first.

    Each form is scored by the fit of the independence model on its 2 x senses
    presence table; ranking is ascending p-value, then descending G2, then the
    form itself.
    """
    missing = [i for i, inst in enumerate(instances) if inst.sense is None]
    if missing:
        raise SchemaMismatchError(f"instances without a gold sense: {missing[:5]}")
    sense_values = tuple(senses) if senses else tuple(sorted({i.sense for i in instances}))
    present_sets = [_sentence_forms(inst) for inst in instances]
    scored = []
    for form in candidates:
        schema = VariableSchema([(form, (ABSENT, PRESENT)), (TAG, sense_values)])
        rows = [
            {form: PRESENT if form in forms else ABSENT, TAG: inst.sense}
            for inst, forms in zip(instances, present_sets)
        ]
        scored.append((form, feature_informativeness(build_table(rows, schema))))
    scored.sort(key=lambda fr: (fr[1].p_value, -fr[1].g2, fr[0]))
    return scored


def select_collocations(
    instances: Sequence[InstanceRecord],
    candidates: Sequence[str],
    m: int = 5,
    senses: Sequence[str] | None = None,
) -> list[str]:
    """The m most informative candidate forms on the given (training) instances."""
    if m > len(candidates):
        raise SchemaMismatchError(f"cannot select {m} forms from {len(candidates)} candidates")
    return [form for form, _ in score_collocations(instances, candidates, senses)[:m]]


def vectorize(
    instances: Sequence[InstanceRecord],
    spec: FeatureSpec,
    senses: Sequence[str] | None = None,
) -> tuple[VariableSchema, list[dict[str, str]]]:
    """Map instances to full assignments over a fixed schema.

    Variable order: collocations as declared, POS offsets left to right,
    ending, tag.  POS value sets are the observed classes plus the reserved
    boundary label, sorted; the tag value set is the declared sense inventory
    (observed senses when not given).
    """
    offsets = tuple(sorted(spec.pos_offsets))
    rows: list[dict[str, str]] = []
    pos_values: dict[int, set[str]] = {o: {BOUNDARY} for o in offsets}
    for inst in instances:
        if inst.sense is None:
            raise SchemaMismatchError(
                f"instance {inst.ident} has no gold sense but the schema includes {TAG!r}"
            )
        forms = _sentence_forms(inst)
        row: dict[str, str] = {}
        for form in spec.collocation_forms:
            row[form] = PRESENT if form in forms else ABSENT
        for o in offsets:
            value = extract_pos(inst, o, spec)
            pos_values[o].add(value)
            row[pos_variable_name(o)] = value
        if spec.use_ending:
            row["ending"] = extract_ending(inst, spec)
        row[TAG] = inst.sense
        rows.append(row)

    sense_values = tuple(senses) if senses else tuple(sorted({i.sense for i in instances}))
    if len(sense_values) < 2:
        raise SchemaMismatchError("schema needs at least 2 sense values")
    variables: list[tuple[str, tuple[str, ...]]] = []
    for form in spec.collocation_forms:
        variables.append((form, (ABSENT, PRESENT)))
    for o in offsets:
        variables.append((pos_variable_name(o), tuple(sorted(pos_values[o]))))
    if spec.use_ending:
        variables.append(("ending", (SINGULAR, PLURAL)))
    variables.append((TAG, sense_values))
    return VariableSchema(variables), rows
