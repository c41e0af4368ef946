"""Sense tagging with a fitted model, and test-set scoring.

An instance is tagged with the sense maximizing the estimated joint
probability of its feature values.  Instances whose feature combination the
training data cannot cover are left untagged, and untagged instances count
as wrong in the evaluation report.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Mapping, Sequence

from .decomposable import UNCOVERED, FittedModel, Uncovered, estimate_cell
from .errors import SchemaMismatchError


@dataclass(frozen=True)
class Prediction:
    """Outcome for one instance: a sense with a positive score, or untagged."""

    instance_id: int | str | None
    sense: str | None
    score: float | None

    @property
    def tagged(self) -> bool:
        return self.sense is not None


@dataclass(frozen=True)
class EvaluationReport:
    total: int
    correct: int
    wrong_tagged: int
    untagged: int
    confusion: tuple[tuple[tuple[str, str | None], int], ...]

    @property
    def percent_correct(self) -> float:
        return self.correct / self.total if self.total else 0.0

    def to_text(self) -> str:
        lines = [
            f"total\t{self.total}",
            f"correct\t{self.correct}",
            f"wrong_tagged\t{self.wrong_tagged}",
            f"untagged\t{self.untagged}",
            f"percent_correct\t{self.percent_correct:.4f}",
        ]
        if self.total == 0:
            lines.append("note\tempty test set: nothing was evaluated")
        lines.append("confusion\tgold\tpredicted\tcount")
        for (gold, predicted), count in self.confusion:
            lines.append(f"confusion\t{gold}\t{predicted if predicted is not None else '-'}\t{count}")
        return "\n".join(lines) + "\n"


def posterior(fitted: FittedModel, features: Mapping[str, str], tag_var: str = "tag"):
    """Per-sense joint-probability scores, or UNCOVERED.

    `features` must assign every model variable except `tag_var`.  A sense is
    individually UNCOVERED when its cell is; the whole result is UNCOVERED
    when every sense is uncovered or every covered score is zero.
    """
    names = set(fitted.schema.names)
    if tag_var not in names:
        raise SchemaMismatchError(f"model has no variable {tag_var!r}")
    expected = names - {tag_var}
    given = set(features)
    if given != expected:
        missing = sorted(expected - given)
        extra = sorted(given - expected)
        raise SchemaMismatchError(
            f"features must cover every variable except {tag_var!r}; "
            f"missing={missing} unexpected={extra}"
        )
    scores: dict[str, float | Uncovered] = {}
    for sense in fitted.schema.values_of(tag_var):
        cell = dict(features)
        cell[tag_var] = sense
        scores[sense] = estimate_cell(fitted, cell)
    real = [s for s in scores.values() if not isinstance(s, Uncovered)]
    if not real or all(s == 0.0 for s in real):
        return UNCOVERED
    return scores


def classify(
    fitted: FittedModel,
    features: Mapping[str, str],
    tag_var: str = "tag",
    instance_id: int | str | None = None,
) -> Prediction:
    """Tag with the argmax sense; ties prefer the larger training marginal, then
    the lexicographically smaller label.  Untagged when nothing scores > 0."""
    scores = posterior(fitted, features, tag_var)
    if isinstance(scores, Uncovered):
        return Prediction(instance_id, None, None)
    marginal = fitted.tag_marginal(tag_var)
    candidates = [
        (sense, score)
        for sense, score in scores.items()
        if not isinstance(score, Uncovered) and score > 0.0
    ]
    if not candidates:
        return Prediction(instance_id, None, None)
    sense, score = min(
        candidates,
        key=lambda item: (-item[1], -marginal.count_of({tag_var: item[0]}), item[0]),
    )
    return Prediction(instance_id, sense, score)


def evaluate_predictions(
    predictions: Sequence[Prediction], gold_senses: Sequence[str]
) -> EvaluationReport:
    """Score predictions against gold senses; untagged counts as wrong."""
    if len(predictions) != len(gold_senses):
        raise SchemaMismatchError("predictions and gold senses differ in length")
    correct = wrong_tagged = untagged = 0
    confusion: Counter = Counter()
    for pred, gold in zip(predictions, gold_senses):
        confusion[(gold, pred.sense)] += 1
        if pred.sense is None:
            untagged += 1
        elif pred.sense == gold:
            correct += 1
        else:
            wrong_tagged += 1
    ordered = tuple(
        sorted(confusion.items(), key=lambda kv: (kv[0][0], kv[0][1] is None, kv[0][1] or ""))
    )
    return EvaluationReport(
        total=len(predictions),
        correct=correct,
        wrong_tagged=wrong_tagged,
        untagged=untagged,
        confusion=ordered,
    )


def evaluate(
    fitted: FittedModel,
    test_instances: Sequence[Mapping[str, str]],
    tag_var: str = "tag",
) -> EvaluationReport:
    """Classify full test assignments (gold sense included) and score them."""
    predictions = []
    golds = []
    for i, inst in enumerate(test_instances):
        if tag_var not in inst:
            raise SchemaMismatchError(f"test instance {i} is missing its gold {tag_var!r}")
        features = {k: v for k, v in inst.items() if k != tag_var}
        predictions.append(classify(fitted, features, tag_var, instance_id=i))
        golds.append(inst[tag_var])
    return evaluate_predictions(predictions, golds)


def majority_sense(tag_counts: Mapping[str, int]) -> str:
    """Most frequent sense; ties break to the lexicographically smaller label."""
    if not tag_counts:
        raise SchemaMismatchError("no sense counts given")
    return min(tag_counts, key=lambda s: (-tag_counts[s], s))
