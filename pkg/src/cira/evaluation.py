"""End-to-end evaluation: balance, split, cross-validate, compare.

``cross_validate`` runs the full procedure for one system: per
repetition, a fresh stratified test draw and k validation folds, the
system's own selection/fit over the folds, then scoring on the held-out
test set; metrics are averaged over repetitions. ``compare`` lays the
per-system rows out side by side with deltas against a reference system.

Systems are duck-typed: anything with ``system_id``, ``family``,
``best_hyperparameters``, ``fit(folds, seed)`` and ``predict(texts)``
fits the contract (see ``cira.systems``).
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from typing import Any, Optional, Protocol, Sequence

from .corpus import Dataset, split, undersample
from .errors import CiraError, DataError

FAMILY_ORDER = ("rule", "shallow", "transformer", "dummy")


@dataclass(frozen=True)
class ClassMetrics:
    recall: float
    precision: float
    f1: float
    support: int


@dataclass(frozen=True)
class EvaluationRow:
    system_id: str
    family: str
    best_hyperparameters: dict[str, Any]
    causal: ClassMetrics
    not_causal: ClassMetrics
    accuracy: float
    repetitions: int
    folds: int

    @property
    def macro_recall(self) -> float:
        return (self.causal.recall + self.not_causal.recall) / 2

    @property
    def macro_precision(self) -> float:
        return (self.causal.precision + self.not_causal.precision) / 2

    @property
    def macro_f1(self) -> float:
        return (self.causal.f1 + self.not_causal.f1) / 2


class System(Protocol):
    system_id: str
    family: str

    @property
    def best_hyperparameters(self) -> dict[str, Any]: ...

    def fit(self, folds: Sequence[tuple[Dataset, Dataset]], seed: int) -> None: ...

    def predict(self, texts: Sequence[str]) -> list[int]: ...


def _class_metrics(predictions: Sequence[int], gold: Sequence[int],
                   positive: int) -> ClassMetrics:
    tp = sum(1 for p, g in zip(predictions, gold)
             if p == positive and g == positive)
    fp = sum(1 for p, g in zip(predictions, gold)
             if p == positive and g != positive)
    fn = sum(1 for p, g in zip(predictions, gold)
             if p != positive and g == positive)
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f1 = 2 * precision * recall / (precision + recall) \
        if precision + recall else 0.0
    return ClassMetrics(recall=recall, precision=precision, f1=f1,
                        support=tp + fn)


def compute_metrics(
    predictions: Sequence[int], gold: Sequence[int]
) -> tuple[ClassMetrics, ClassMetrics, float]:
    """Per-class precision/recall/F1 (causal=1, not-causal=0) plus accuracy."""
    if len(predictions) != len(gold):
        raise DataError(
            f"{len(predictions)} predictions for {len(gold)} gold labels"
        )
    if not gold:
        raise DataError("cannot score an empty prediction list")
    accuracy = sum(1 for p, g in zip(predictions, gold) if p == g) / len(gold)
    return (
        _class_metrics(predictions, gold, positive=1),
        _class_metrics(predictions, gold, positive=0),
        accuracy,
    )


def macro_f1(predictions: Sequence[int], gold: Sequence[int]) -> float:
    causal, not_causal, _ = compute_metrics(predictions, gold)
    return (causal.f1 + not_causal.f1) / 2


class EvaluationError(CiraError):
    """Training or scoring failure, annotated with its repetition index."""


def cross_validate(
    system: System,
    dataset: Dataset,
    k: int = 10,
    repetitions: int = 5,
    seed: int = 0,
    test_fraction: float = 0.1,
) -> EvaluationRow:
    """Balanced-data evaluation of one system, averaged over repetitions.

    Each repetition redraws the test split and folds with a
    repetition-indexed seed; the folds drive the system's internal
    selection, the test set is scored once per repetition.
    """
    causal, non_causal = dataset.class_ids()
    if len(causal) != len(non_causal):
        raise DataError(
            f"dataset is not balanced ({len(causal)} causal vs "
            f"{len(non_causal)} non-causal); undersample first"
        )
    per_rep: list[tuple[ClassMetrics, ClassMetrics, float]] = []
    hyperparameters: dict[str, Any] = {}
    for repetition in range(repetitions):
        rep_seed = seed + repetition
        try:
            balanced = undersample(dataset, rep_seed)  # no-op when balanced
            parts = split(balanced, test_fraction=test_fraction, k=k,
                          seed=rep_seed)
            system.fit(parts.folds, rep_seed)
            texts, gold = parts.test.texts_and_labels()
            predictions = system.predict(texts)
        except CiraError as e:
            raise EvaluationError(
                f"{system.system_id}, repetition {repetition}: {e}"
            ) from e
        per_rep.append(compute_metrics(predictions, gold))
        hyperparameters = dict(system.best_hyperparameters)

    def mean(values):
        return sum(values) / len(values)

    def mean_class(select) -> ClassMetrics:
        picked = [select(rep) for rep in per_rep]
        return ClassMetrics(
            recall=mean([m.recall for m in picked]),
            precision=mean([m.precision for m in picked]),
            f1=mean([m.f1 for m in picked]),
            support=round(mean([m.support for m in picked])),
        )

    return EvaluationRow(
        system_id=system.system_id,
        family=system.family,
        best_hyperparameters=hyperparameters,
        causal=mean_class(lambda rep: rep[0]),
        not_causal=mean_class(lambda rep: rep[1]),
        accuracy=mean([rep[2] for rep in per_rep]),
        repetitions=repetitions,
        folds=k,
    )


# ---------------------------------------------------------------------------
# Comparison reports

@dataclass(frozen=True)
class Comparison:
    rows: tuple[EvaluationRow, ...]
    reference_id: str
    deltas: dict[str, dict[str, float]] = field(default_factory=dict)
    column_winners: dict[str, str] = field(default_factory=dict)
    average_gain: dict[str, float] = field(default_factory=dict)


_METRIC_COLUMNS = {
    "recall_causal": lambda r: r.causal.recall,
    "precision_causal": lambda r: r.causal.precision,
    "f1_causal": lambda r: r.causal.f1,
    "recall_not_causal": lambda r: r.not_causal.recall,
    "precision_not_causal": lambda r: r.not_causal.precision,
    "f1_not_causal": lambda r: r.not_causal.f1,
    "accuracy": lambda r: r.accuracy,
    "macro_recall": lambda r: r.macro_recall,
    "macro_precision": lambda r: r.macro_precision,
    "macro_f1": lambda r: r.macro_f1,
}


def compare(rows: Sequence[EvaluationRow],
            reference_id: Optional[str] = None) -> Comparison:
    """Side-by-side comparison with deltas against a reference row.

    Rows are ordered by family (rule, shallow, transformer) then id. The
    reference defaults to the row with the best macro-F1. ``average_gain``
    is the reference's macro metrics minus the mean of all other rows'.
    """
    if len(rows) < 2:
        raise DataError("comparison needs at least two rows")
    ids = [r.system_id for r in rows]
    if len(set(ids)) != len(ids):
        raise DataError(f"duplicate system ids: {sorted(ids)}")

    family_rank = {name: i for i, name in enumerate(FAMILY_ORDER)}
    ordered = tuple(sorted(
        rows, key=lambda r: (family_rank.get(r.family, len(FAMILY_ORDER)),
                             r.system_id)
    ))
    if reference_id is None:
        reference_id = max(rows, key=lambda r: r.macro_f1).system_id
    by_id = {r.system_id: r for r in rows}
    if reference_id not in by_id:
        raise DataError(f"reference system {reference_id!r} not among rows")
    reference = by_id[reference_id]

    deltas = {
        r.system_id: {
            "macro_recall": r.macro_recall - reference.macro_recall,
            "macro_precision": r.macro_precision - reference.macro_precision,
            "macro_f1": r.macro_f1 - reference.macro_f1,
        }
        for r in ordered
    }
    winners = {
        column: max(ordered, key=metric).system_id
        for column, metric in _METRIC_COLUMNS.items()
    }
    others = [r for r in ordered if r.system_id != reference_id]
    gain = {
        "macro_recall": reference.macro_recall
        - sum(r.macro_recall for r in others) / len(others),
        "macro_precision": reference.macro_precision
        - sum(r.macro_precision for r in others) / len(others),
        "macro_f1": reference.macro_f1
        - sum(r.macro_f1 for r in others) / len(others),
    }
    return Comparison(rows=ordered, reference_id=reference_id, deltas=deltas,
                      column_winners=winners, average_gain=gain)


def report_to_csv(rows: Sequence[EvaluationRow]) -> str:
    out = io.StringIO()
    writer = csv.writer(out)
    writer.writerow([
        "system", "family", "best_hyperparameters",
        "recall_causal", "precision_causal", "f1_causal",
        "recall_not_causal", "precision_not_causal", "f1_not_causal",
        "accuracy", "macro_recall", "macro_precision", "macro_f1",
        "support_causal", "support_not_causal", "repetitions", "folds",
    ])
    for r in rows:
        writer.writerow([
            r.system_id, r.family,
            json.dumps(r.best_hyperparameters, sort_keys=True, default=str),
            f"{r.causal.recall:.6f}", f"{r.causal.precision:.6f}",
            f"{r.causal.f1:.6f}",
            f"{r.not_causal.recall:.6f}", f"{r.not_causal.precision:.6f}",
            f"{r.not_causal.f1:.6f}",
            f"{r.accuracy:.6f}", f"{r.macro_recall:.6f}",
            f"{r.macro_precision:.6f}", f"{r.macro_f1:.6f}",
            r.causal.support, r.not_causal.support, r.repetitions, r.folds,
        ])
    return out.getvalue()


def comparison_to_text(comparison: Comparison) -> str:
    lines = []
    header = (
        f"{'system':<28} {'R(c)':>6} {'P(c)':>6} {'F1(c)':>6} "
        f"{'R(n)':>6} {'P(n)':>6} {'F1(n)':>6} {'Acc':>6}  best-hyperparameters"
    )
    lines.append(header)
    lines.append("-" * len(header))
    for r in comparison.rows:
        marker = "*" if r.system_id == comparison.reference_id else " "
        lines.append(
            f"{marker}{r.system_id:<27} "
            f"{r.causal.recall:>6.2f} {r.causal.precision:>6.2f} "
            f"{r.causal.f1:>6.2f} "
            f"{r.not_causal.recall:>6.2f} {r.not_causal.precision:>6.2f} "
            f"{r.not_causal.f1:>6.2f} {r.accuracy:>6.2f}  "
            f"{json.dumps(r.best_hyperparameters, sort_keys=True, default=str)}"
        )
    lines.append("")
    lines.append(f"reference: {comparison.reference_id}")
    for system_id, delta in comparison.deltas.items():
        if system_id == comparison.reference_id:
            continue
        lines.append(
            f"  {system_id:<26} dMacroR {delta['macro_recall']:+.4f}  "
            f"dMacroP {delta['macro_precision']:+.4f}  "
            f"dMacroF1 {delta['macro_f1']:+.4f}"
        )
    gain = comparison.average_gain
    lines.append(
        f"average gain of reference over the rest: "
        f"macro-Recall {gain['macro_recall']:+.4f}, "
        f"macro-Precision {gain['macro_precision']:+.4f}, "
        f"macro-F1 {gain['macro_f1']:+.4f}"
    )
    return "\n".join(lines) + "\n"
