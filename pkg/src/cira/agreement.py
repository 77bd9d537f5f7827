"""Pairwise inter-annotator agreement statistics.

Implements percent agreement, Cohen's Kappa, and Gwet's AC1 over a
contingency table of two raters' labels, plus a per-category report for
the binary categories (the ternary ones were labeled jointly and carry no
reliability assessment).

Kappa corrects chance agreement with the product of the raters' marginal
distributions, which collapses under skewed prevalence even when raw
agreement is high; AC1 uses a prevalence-based chance estimate and stays
informative in that regime. Reporting all three together is what makes
the numbers interpretable.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Any, Iterable, Mapping, Optional, Sequence

from .corpus import BINARY_CATEGORIES, AnnotationRecord
from .errors import DataError

_EPS = 1e-12

#: Qualitative bands for chance-corrected coefficients (upper bounds).
AGREEMENT_BANDS = (
    (0.0, "no agreement"),
    (0.20, "none to slight"),
    (0.40, "fair"),
    (0.60, "moderate"),
    (0.80, "substantial"),
    (1.00, "almost perfect"),
)


def qualitative_band(value: float) -> str:
    for upper, name in AGREEMENT_BANDS:
        if value <= upper + _EPS:
            return name
    return AGREEMENT_BANDS[-1][1]


@dataclass(frozen=True)
class ContingencyTable:
    """q x q label-by-label counts; rows are rater A, columns rater B."""

    categories: tuple[Any, ...]
    counts: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        q = len(self.categories)
        if q < 2:
            raise DataError("contingency table needs at least two labels")
        if len(self.counts) != q or any(len(row) != q for row in self.counts):
            raise DataError(f"counts must be a {q}x{q} matrix")
        if any(c < 0 for row in self.counts for c in row):
            raise DataError("negative cell count")

    @property
    def n(self) -> int:
        return sum(sum(row) for row in self.counts)

    @property
    def q(self) -> int:
        return len(self.categories)

    def row_totals(self) -> list[int]:
        return [sum(row) for row in self.counts]

    def col_totals(self) -> list[int]:
        return [sum(row[j] for row in self.counts) for j in range(self.q)]

    def diagonal(self) -> int:
        return sum(self.counts[i][i] for i in range(self.q))


def table_from_annotations(
    records: Iterable[AnnotationRecord],
    category: str,
    rater_a: str,
    rater_b: str,
    labels: Optional[Sequence[Any]] = None,
) -> ContingencyTable:
    """Tally the two raters' labels over their shared sentences."""
    by_rater: dict[str, dict[str, Any]] = {rater_a: {}, rater_b: {}}
    for record in records:
        if record.annotator_id in by_rater and category in record.labels:
            by_rater[record.annotator_id][record.sentence_id] = \
                record.labels[category]
    shared = sorted(set(by_rater[rater_a]) & set(by_rater[rater_b]))
    if not shared:
        raise DataError(
            f"no overlap: raters {rater_a!r} and {rater_b!r} share no "
            f"sentences labeled for {category}"
        )
    if labels is None:
        labels = sorted(
            {by_rater[r][s] for r in (rater_a, rater_b) for s in shared},
            key=repr,
        )
        if len(labels) == 1:
            labels = list(labels) + ["<other>"]
    index = {label: i for i, label in enumerate(labels)}
    counts = [[0] * len(labels) for _ in labels]
    for sentence_id in shared:
        counts[index[by_rater[rater_a][sentence_id]]][
            index[by_rater[rater_b][sentence_id]]] += 1
    return ContingencyTable(tuple(labels), tuple(map(tuple, counts)))


def pooled_table(
    records: Iterable[AnnotationRecord],
    category: str,
    labels: Optional[Sequence[Any]] = None,
) -> ContingencyTable:
    """One table pooling every annotator pair's overlap for a category.

    For each sentence labeled by m >= 2 annotators, all m(m-1)/2 ordered-
    by-annotator-id pairs contribute one tally.
    """
    per_sentence: dict[str, dict[str, Any]] = {}
    for record in records:
        if category in record.labels:
            per_sentence.setdefault(record.sentence_id, {})[
                record.annotator_id] = record.labels[category]
    if labels is None:
        labels = sorted(
            {v for votes in per_sentence.values() for v in votes.values()},
            key=repr,
        )
        if len(labels) == 1:
            labels = list(labels) + ["<other>"]
    index = {label: i for i, label in enumerate(labels)}
    counts = [[0] * len(labels) for _ in labels]
    n = 0
    for votes in per_sentence.values():
        raters = sorted(votes)
        for i, a in enumerate(raters):
            for b in raters[i + 1:]:
                counts[index[votes[a]]][index[votes[b]]] += 1
                n += 1
    if n == 0:
        raise DataError(f"no overlap for category {category}")
    return ContingencyTable(tuple(labels), tuple(map(tuple, counts)))


def percent_agreement(table: ContingencyTable) -> float:
    """Share of items both raters labeled identically."""
    if table.n == 0:
        raise DataError("empty contingency table")
    return table.diagonal() / table.n


def cohens_kappa(table: ContingencyTable) -> float:
    """Chance-corrected agreement with marginal-product expected agreement."""
    n = table.n
    if n == 0:
        raise DataError("empty contingency table")
    p_o = table.diagonal() / n
    rows, cols = table.row_totals(), table.col_totals()
    p_e = sum(r * c for r, c in zip(rows, cols)) / (n * n)
    if p_e >= 1.0 - _EPS:
        if p_o >= 1.0 - _EPS:
            return 1.0
        raise DataError("degenerate marginals: expected agreement is 1")
    return (p_o - p_e) / (1.0 - p_e)


def gwets_ac1(table: ContingencyTable) -> float:
    """Chance-corrected agreement with prevalence-based expected agreement."""
    n = table.n
    if n == 0:
        raise DataError("empty contingency table")
    p_o = table.diagonal() / n
    rows, cols = table.row_totals(), table.col_totals()
    pi = [(r + c) / (2.0 * n) for r, c in zip(rows, cols)]
    p_e = sum(p * (1.0 - p) for p in pi) / (table.q - 1)
    if p_e >= 1.0 - _EPS:
        if p_o >= 1.0 - _EPS:
            return 1.0
        raise DataError("degenerate table: expected agreement is 1")
    return (p_o - p_e) / (1.0 - p_e)


@dataclass(frozen=True)
class CategoryAgreement:
    category: str
    table: ContingencyTable
    agreement: float
    kappa: float
    ac1: float

    @property
    def band(self) -> str:
        return qualitative_band(self.ac1)


@dataclass(frozen=True)
class AgreementReport:
    rows: tuple[CategoryAgreement, ...]

    @property
    def average_agreement(self) -> float:
        return sum(r.agreement for r in self.rows) / len(self.rows)

    @property
    def average_kappa(self) -> float:
        return sum(r.kappa for r in self.rows) / len(self.rows)

    @property
    def average_ac1(self) -> float:
        return sum(r.ac1 for r in self.rows) / len(self.rows)


def agreement_report(
    records: Iterable[AnnotationRecord],
    categories: Sequence[str] = BINARY_CATEGORIES,
) -> AgreementReport:
    """Pooled per-category agreement over the binary categories.

    Categories without any overlap are skipped; at least one category must
    have overlap.
    """
    records = list(records)
    rows = []
    for category in categories:
        try:
            table = pooled_table(records, category, labels=(0, 1))
        except DataError:
            continue
        rows.append(CategoryAgreement(
            category=category,
            table=table,
            agreement=percent_agreement(table),
            kappa=cohens_kappa(table),
            ac1=gwets_ac1(table),
        ))
    if not rows:
        raise DataError("no category has overlapping annotations")
    return AgreementReport(tuple(rows))


def report_from_tables(
    tables: Mapping[str, ContingencyTable]
) -> AgreementReport:
    """Build a report directly from per-category contingency tables."""
    rows = tuple(
        CategoryAgreement(
            category=category,
            table=table,
            agreement=percent_agreement(table),
            kappa=cohens_kappa(table),
            ac1=gwets_ac1(table),
        )
        for category, table in tables.items()
    )
    if not rows:
        raise DataError("no tables given")
    return AgreementReport(rows)


# Report rounding: one decimal for percentages, three for coefficients.

def report_to_csv(report: AgreementReport) -> str:
    out = io.StringIO()
    writer = csv.writer(out)
    writer.writerow(["category", "n00", "n01", "n10", "n11",
                     "agreement_pct", "cohens_kappa", "gwets_ac1", "band"])
    for row in report.rows:
        c = row.table.counts
        writer.writerow([
            row.category, c[0][0], c[0][1], c[1][0], c[1][1],
            f"{100 * row.agreement:.1f}", f"{row.kappa:.3f}",
            f"{row.ac1:.3f}", row.band,
        ])
    writer.writerow([
        "avg.", "", "", "", "",
        f"{100 * report.average_agreement:.1f}",
        f"{report.average_kappa:.3f}", f"{report.average_ac1:.3f}", "",
    ])
    return out.getvalue()


def report_to_text(report: AgreementReport) -> str:
    headers = ["", *[r.category for r in report.rows], "avg."]
    lines = [
        ["Agreement"] + [f"{100 * r.agreement:.1f} %" for r in report.rows]
        + [f"{100 * report.average_agreement:.1f} %"],
        ["Cohen's Kappa"] + [f"{r.kappa:.3f}" for r in report.rows]
        + [f"{report.average_kappa:.3f}"],
        ["Gwet's AC1"] + [f"{r.ac1:.3f}" for r in report.rows]
        + [f"{report.average_ac1:.3f}"],
    ]
    widths = [max(len(str(row[i])) for row in [headers] + lines)
              for i in range(len(headers))]
    def fmt(row):
        return "  ".join(str(cell).ljust(w) for cell, w in zip(row, widths))
    return "\n".join([fmt(headers)] + [fmt(row) for row in lines]) + "\n"
