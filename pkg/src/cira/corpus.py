"""Corpus data model: documents, sentences, labels, and dataset operations.

A corpus is a flat, ordered collection of sentences grouped into documents.
Each sentence may carry gold labels for the nine annotation categories:
seven binary ones plus two ternary ones (Relationship and Temporality).
The dependent categories are only meaningful on causal sentences, and that
rule is enforced both at load time and when consolidating annotations.

Datasets are immutable values; every operation returns a new ``Dataset``.
"""

from __future__ import annotations

import csv
import hashlib
import json
import random
from collections import Counter, defaultdict
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Iterable, Iterator, Mapping, Optional, Sequence

from .errors import DataError, SchemaViolation

CAUSALITY = "Causality"

BINARY_CATEGORIES = (
    "Causality",
    "Explicit",
    "Marked",
    "SingleSentence",
    "SingleCause",
    "SingleEffect",
    "EventChain",
)

TERNARY_CATEGORIES = {
    "Relationship": ("cause", "enable", "prevent"),
    "Temporality": ("before", "overlap", "during"),
}

ALL_CATEGORIES = BINARY_CATEGORIES + tuple(TERNARY_CATEGORIES)

#: Categories that are only meaningful when Causality = 1.
DEPENDENT_CATEGORIES = tuple(c for c in ALL_CATEGORIES if c != CAUSALITY)


@dataclass(frozen=True)
class CategorySchema:
    """The fixed nine-category label schema."""

    binary_categories: tuple[str, ...] = BINARY_CATEGORIES
    ternary_categories: Mapping[str, tuple[str, ...]] = field(
        default_factory=lambda: dict(TERNARY_CATEGORIES)
    )

    @property
    def categories(self) -> tuple[str, ...]:
        return self.binary_categories + tuple(self.ternary_categories)

    def is_binary(self, category: str) -> bool:
        return category in self.binary_categories

    def values_for(self, category: str) -> tuple:
        if category in self.binary_categories:
            return (0, 1)
        if category in self.ternary_categories:
            return tuple(self.ternary_categories[category])
        raise DataError(f"unknown category: {category!r}")

    def validate_labels(self, labels: Mapping[str, Any]) -> None:
        """Check a label map against the schema rules.

        Raises :class:`SchemaViolation` naming the broken rule.
        """
        for category, value in labels.items():
            if category not in self.categories:
                raise SchemaViolation(
                    "unknown-category", f"unknown category: {category!r}"
                )
            allowed = self.values_for(category)
            if value not in allowed:
                raise SchemaViolation(
                    "invalid-label-value",
                    f"label {value!r} not allowed for {category}; "
                    f"expected one of {allowed}",
                )
        if labels.get(CAUSALITY) != 1:
            dependent = sorted(set(labels) & set(DEPENDENT_CATEGORIES))
            if dependent:
                raise SchemaViolation(
                    "dependent-category-requires-causal",
                    f"labels for {dependent} require {CAUSALITY}=1",
                )


DEFAULT_SCHEMA = CategorySchema()


@dataclass(frozen=True)
class Sentence:
    id: str
    text: str
    doc_id: str
    index_in_doc: int
    domain: str = ""
    year: Optional[int] = None

    def __post_init__(self):
        if not self.text.strip():
            raise DataError(f"sentence {self.id!r}: empty text")
        if self.index_in_doc < 0:
            raise DataError(f"sentence {self.id!r}: negative index_in_doc")


@dataclass(frozen=True)
class AnnotationRecord:
    """One annotator's labels for one sentence."""

    sentence_id: str
    annotator_id: str
    labels: Mapping[str, Any]
    cue_phrases: tuple[str, ...] = ()
    timestamp: str = ""

    def validate(self, schema: CategorySchema = DEFAULT_SCHEMA) -> None:
        schema.validate_labels(self.labels)
        if CAUSALITY not in self.labels:
            raise SchemaViolation(
                "missing-causality", f"record for {self.sentence_id!r} has no "
                f"{CAUSALITY} label"
            )

    @property
    def is_complete(self) -> bool:
        return self.labels.get(CAUSALITY) in (0, 1)


@dataclass(frozen=True)
class Dataset:
    """Immutable corpus snapshot: sentences plus consolidated gold labels."""

    sentences: tuple[Sentence, ...]
    gold_labels: Mapping[str, Mapping[str, Any]] = field(default_factory=dict)
    cue_phrases: Mapping[str, tuple[str, ...]] = field(default_factory=dict)
    provenance: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        index = {}
        for s in self.sentences:
            if s.id in index:
                raise DataError(f"duplicate id {s.id!r}")
            index[s.id] = s
        for sid in self.gold_labels:
            if sid not in index:
                raise DataError(f"gold label for unknown sentence {sid!r}")
        object.__setattr__(self, "_by_id", index)
        by_doc: dict[str, list[Sentence]] = defaultdict(list)
        for s in self.sentences:
            by_doc[s.doc_id].append(s)
        for doc_id, rows in by_doc.items():
            seen = Counter(s.index_in_doc for s in rows)
            dupes = [i for i, c in seen.items() if c > 1]
            if dupes:
                raise DataError(
                    f"document {doc_id!r}: duplicate index_in_doc {dupes[0]}"
                )
            rows.sort(key=lambda s: s.index_in_doc)
        object.__setattr__(self, "_by_doc", dict(by_doc))

    def __len__(self) -> int:
        return len(self.sentences)

    def __iter__(self) -> Iterator[Sentence]:
        return iter(self.sentences)

    def sentence(self, sentence_id: str) -> Sentence:
        try:
            return self._by_id[sentence_id]
        except KeyError:
            raise DataError(f"unknown sentence id: {sentence_id!r}") from None

    def __contains__(self, sentence_id: str) -> bool:
        return sentence_id in self._by_id

    def labels_for(self, sentence_id: str) -> Mapping[str, Any]:
        return self.gold_labels.get(sentence_id, {})

    def causality_of(self, sentence_id: str) -> Optional[int]:
        return self.labels_for(sentence_id).get(CAUSALITY)

    def class_ids(self) -> tuple[list[str], list[str]]:
        """Sentence ids split into (causal, non-causal), in corpus order.

        Sentences without a Causality gold label are not included.
        """
        causal, non_causal = [], []
        for s in self.sentences:
            label = self.causality_of(s.id)
            if label == 1:
                causal.append(s.id)
            elif label == 0:
                non_causal.append(s.id)
        return causal, non_causal

    def subset(self, ids: Iterable[str], note: Optional[dict] = None) -> "Dataset":
        keep = set(ids)
        provenance = dict(self.provenance)
        if note:
            provenance.update(note)
        return Dataset(
            sentences=tuple(s for s in self.sentences if s.id in keep),
            gold_labels={k: v for k, v in self.gold_labels.items() if k in keep},
            cue_phrases={k: v for k, v in self.cue_phrases.items() if k in keep},
            provenance=provenance,
        )

    def texts_and_labels(self) -> tuple[list[str], list[int]]:
        """Texts plus 0/1 Causality labels for all labeled sentences."""
        texts, labels = [], []
        for s in self.sentences:
            label = self.causality_of(s.id)
            if label is not None:
                texts.append(s.text)
                labels.append(label)
        return texts, labels


def sentence_context(
    dataset: Dataset, sentence_id: str
) -> tuple[Optional[Sentence], Sentence, Optional[Sentence]]:
    """The sentence plus its neighbors in document order.

    Neighbors are absent at document boundaries.
    """
    target = dataset.sentence(sentence_id)
    rows = dataset._by_doc[target.doc_id]
    pos = rows.index(target)
    predecessor = rows[pos - 1] if pos > 0 else None
    successor = rows[pos + 1] if pos + 1 < len(rows) else None
    return predecessor, target, successor


# ---------------------------------------------------------------------------
# Load / save

_ROW_FIELDS = ("id", "doc_id", "index_in_doc", "domain", "year", "text",
               "labels", "cue_phrases")


def _parse_row(raw: Mapping[str, Any], line: int,
               schema: CategorySchema) -> tuple[Sentence, dict, tuple]:
    def fail(field_name: str, why: str):
        raise DataError(f"line {line}, field {field_name!r}: {why}")

    for required in ("doc_id", "index_in_doc", "text"):
        if raw.get(required) in (None, ""):
            fail(required, "missing")
    try:
        index_in_doc = int(raw["index_in_doc"])
    except (TypeError, ValueError):
        fail("index_in_doc", f"not an integer: {raw['index_in_doc']!r}")
    text = str(raw["text"])
    if not text.strip():
        fail("text", "empty after trimming")
    sid = raw.get("id") or f"{raw['doc_id']}#{index_in_doc}"
    year = raw.get("year")
    if year in (None, ""):
        year = None
    else:
        try:
            year = int(year)
        except (TypeError, ValueError):
            fail("year", f"not an integer: {raw['year']!r}")
    try:
        sentence = Sentence(
            id=str(sid), text=text, doc_id=str(raw["doc_id"]),
            index_in_doc=index_in_doc, domain=str(raw.get("domain") or ""),
            year=year,
        )
    except DataError as e:
        raise DataError(f"line {line}: {e}") from None

    labels = dict(raw.get("labels") or {})
    for category, value in list(labels.items()):
        if category in schema.categories and schema.is_binary(category):
            try:
                labels[category] = int(value)
            except (TypeError, ValueError):
                fail(f"labels.{category}", f"not 0/1: {value!r}")
    try:
        schema.validate_labels(labels)
    except SchemaViolation as e:
        raise DataError(f"line {line}, field 'labels': {e}") from None

    cues = raw.get("cue_phrases") or ()
    if isinstance(cues, str):
        fail("cue_phrases", "expected an array of strings")
    return sentence, labels, tuple(str(c) for c in cues)


def _rows_from_jsonl(path: Path) -> Iterator[tuple[int, dict]]:
    with path.open("r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                yield line_no, json.loads(line)
            except json.JSONDecodeError as e:
                raise DataError(f"line {line_no}: invalid JSON: {e.msg}") from None


def _rows_from_csv(path: Path) -> Iterator[tuple[int, dict]]:
    with path.open("r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        for line_no, row in enumerate(reader, start=2):  # header is line 1
            labels = {}
            for key, value in row.items():
                if key.startswith("label.") and value not in (None, ""):
                    labels[key[len("label."):]] = value
            for category in list(labels):
                if category in BINARY_CATEGORIES:
                    try:
                        labels[category] = int(labels[category])
                    except ValueError:
                        raise DataError(
                            f"line {line_no}, field 'label.{category}': "
                            f"not 0/1: {labels[category]!r}"
                        ) from None
            cues = ()
            if row.get("cue_phrases"):
                try:
                    cues = json.loads(row["cue_phrases"])
                except json.JSONDecodeError:
                    raise DataError(
                        f"line {line_no}, field 'cue_phrases': not a JSON array"
                    ) from None
            yield line_no, {
                "id": row.get("id"), "doc_id": row.get("doc_id"),
                "index_in_doc": row.get("index_in_doc"),
                "domain": row.get("domain"), "year": row.get("year"),
                "text": row.get("text"), "labels": labels, "cue_phrases": cues,
            }


def load_corpus(path: str | Path, format: str = "jsonl",
                schema: CategorySchema = DEFAULT_SCHEMA) -> Dataset:
    """Parse a corpus file into a :class:`Dataset`.

    Sentence order within each document is preserved. Malformed rows raise
    :class:`DataError` naming the line number and field; duplicate ids
    raise with the offending line.
    """
    path = Path(path)
    if not path.exists():
        raise DataError(f"corpus file not found: {path}")
    if format == "jsonl":
        rows = _rows_from_jsonl(path)
    elif format == "csv":
        rows = _rows_from_csv(path)
    else:
        raise DataError(f"unknown corpus format: {format!r}")

    sentences: list[Sentence] = []
    gold: dict[str, dict] = {}
    cue_map: dict[str, tuple[str, ...]] = {}
    seen: dict[str, int] = {}
    for line_no, raw in rows:
        sentence, labels, cues = _parse_row(raw, line_no, schema)
        if sentence.id in seen:
            raise DataError(f"duplicate id {sentence.id!r}, line {line_no}")
        seen[sentence.id] = line_no
        sentences.append(sentence)
        if labels:
            gold[sentence.id] = labels
        if cues:
            cue_map[sentence.id] = cues
    return Dataset(
        sentences=tuple(sentences), gold_labels=gold, cue_phrases=cue_map,
        provenance={"source": str(path), "format": format},
    )


def save_corpus(dataset: Dataset, path: str | Path, format: str = "jsonl") -> None:
    """Write a dataset back to disk in the corpus file format."""
    path = Path(path)
    if format == "jsonl":
        with path.open("w", encoding="utf-8") as fh:
            for s in dataset.sentences:
                row = {
                    "id": s.id, "doc_id": s.doc_id,
                    "index_in_doc": s.index_in_doc, "domain": s.domain,
                    "year": s.year, "text": s.text,
                    "labels": dict(dataset.labels_for(s.id)),
                    "cue_phrases": list(dataset.cue_phrases.get(s.id, ())),
                }
                fh.write(json.dumps(row, ensure_ascii=False) + "\n")
    elif format == "csv":
        label_columns = [f"label.{c}" for c in ALL_CATEGORIES]
        with path.open("w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["id", "doc_id", "index_in_doc", "domain", "year",
                             "text", *label_columns, "cue_phrases"])
            for s in dataset.sentences:
                labels = dataset.labels_for(s.id)
                writer.writerow([
                    s.id, s.doc_id, s.index_in_doc, s.domain,
                    "" if s.year is None else s.year, s.text,
                    *["" if c not in labels else labels[c]
                      for c in ALL_CATEGORIES],
                    json.dumps(list(dataset.cue_phrases.get(s.id, ())))
                    if dataset.cue_phrases.get(s.id) else "",
                ])
    else:
        raise DataError(f"unknown corpus format: {format!r}")


def corpus_fingerprint(path: str | Path) -> str:
    """sha256 of the file bytes, for provenance records."""
    digest = hashlib.sha256()
    with Path(path).open("rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            digest.update(chunk)
    return digest.hexdigest()


def dataset_fingerprint(dataset: Dataset) -> str:
    """Stable digest over sentence ids, texts, and labels."""
    digest = hashlib.sha256()
    for s in dataset.sentences:
        digest.update(s.id.encode())
        digest.update(s.text.encode())
        digest.update(json.dumps(dict(dataset.labels_for(s.id)),
                                 sort_keys=True).encode())
    return digest.hexdigest()


# ---------------------------------------------------------------------------
# Sampling and splitting

def undersample(dataset: Dataset, seed: int) -> Dataset:
    """Balance the two Causality classes by random undersampling.

    All causal (minority) sentences are kept; non-causal sentences are
    removed by uniform random selection without replacement until the
    class counts are equal. Deterministic for a fixed seed.
    """
    causal, non_causal = dataset.class_ids()
    unlabeled = len(dataset) - len(causal) - len(non_causal)
    if unlabeled:
        raise DataError(
            f"{unlabeled} sentences lack a {CAUSALITY} gold label"
        )
    if not causal or not non_causal:
        raise DataError("both classes must be non-empty for undersampling")
    if len(causal) > len(non_causal):
        raise DataError(
            "causal class is the majority; undersampling expects it to be "
            "the minority"
        )
    if len(causal) == len(non_causal):
        return dataset
    rng = random.Random(seed)
    kept_majority = rng.sample(non_causal, len(causal))
    keep = set(causal) | set(kept_majority)
    return dataset.subset(
        keep,
        note={"undersample": {"seed": seed,
                              "removed": len(non_causal) - len(causal)}},
    )


@dataclass(frozen=True)
class SplitResult:
    """Held-out test set plus k rotating (train, validation) partitions."""

    folds: tuple[tuple[Dataset, Dataset], ...]
    test: Dataset

    @property
    def k(self) -> int:
        return len(self.folds)


def _allocate(class_sizes: Sequence[int], total: int) -> list[int]:
    """Largest-remainder allocation of ``total`` over the classes."""
    grand = sum(class_sizes)
    ideal = [size * total / grand for size in class_sizes]
    counts = [int(x) for x in ideal]
    remainder = total - sum(counts)
    order = sorted(range(len(ideal)),
                   key=lambda i: ideal[i] - counts[i], reverse=True)
    for i in order[:remainder]:
        counts[i] += 1
    return counts


def split(dataset: Dataset, test_fraction: float, k: int, seed: int) -> SplitResult:
    """Hold out a stratified test set, then partition the rest into k
    stratified folds.

    Fold i yields (train = everything outside fold i, validation = fold i).
    Folds are disjoint, exhaustive over the non-test remainder, sized
    within one sentence of each other overall and per class.
    """
    if not 0 < test_fraction < 1:
        raise DataError(f"test_fraction must be in (0, 1), got {test_fraction}")
    if k < 2:
        raise DataError(f"k must be at least 2, got {k}")
    causal, non_causal = dataset.class_ids()
    if len(causal) + len(non_causal) != len(dataset):
        raise DataError(f"dataset has sentences without a {CAUSALITY} label")
    classes = [non_causal, causal]  # label order 0, 1
    if min(len(c) for c in classes) == 0:
        raise DataError("both classes must be non-empty to split")

    rng = random.Random(seed)
    shuffled = []
    for ids in classes:
        ids = list(ids)
        rng.shuffle(ids)
        shuffled.append(ids)

    n_test = round(len(dataset) * test_fraction)
    test_counts = _allocate([len(c) for c in shuffled], n_test)
    test_ids: set[str] = set()
    remaining: list[list[str]] = []
    for ids, take in zip(shuffled, test_counts):
        test_ids.update(ids[:take])
        remaining.append(ids[take:])

    if any(len(ids) < k for ids in remaining):
        raise DataError(
            f"k={k} exceeds the per-class sentence count after the test draw"
        )

    # Stagger each class's oversized folds so total fold sizes stay within 1.
    fold_ids: list[set[str]] = [set() for _ in range(k)]
    offset = 0
    for ids in remaining:
        base, extra = divmod(len(ids), k)
        cursor = 0
        for j in range(k):
            take = base + (1 if (j - offset) % k < extra else 0)
            fold_ids[(j) % k].update(ids[cursor:cursor + take])
            cursor += take
        offset = (offset + extra) % k

    note = {"split": {"seed": seed, "k": k, "test_fraction": test_fraction}}
    test = dataset.subset(test_ids, note=note)
    non_test = [sid for ids in remaining for sid in ids]
    folds = []
    for j in range(k):
        validation = dataset.subset(fold_ids[j], note=note)
        train = dataset.subset(
            [sid for sid in non_test if sid not in fold_ids[j]], note=note
        )
        folds.append((train, validation))
    return SplitResult(folds=tuple(folds), test=test)


def category_distribution(
    dataset: Dataset, category: str, schema: CategorySchema = DEFAULT_SCHEMA
) -> dict[Any, tuple[int, float]]:
    """Label counts and proportions for one category.

    Proportions are over the sentences possessing that label; for the
    dependent categories that base is the causal sentences only (the
    dependency rule guarantees it).
    """
    if category not in schema.categories:
        raise DataError(f"unknown category: {category!r}")
    if len(dataset) == 0:
        raise DataError("empty dataset")
    counts: Counter = Counter()
    for s in dataset.sentences:
        labels = dataset.labels_for(s.id)
        if category in labels:
            counts[labels[category]] += 1
    total = sum(counts.values())
    if total == 0:
        raise DataError(f"no sentences carry a {category} label")
    return {
        value: (counts.get(value, 0), counts.get(value, 0) / total)
        for value in schema.values_for(category)
    }


def consolidate_gold(
    records: Iterable[AnnotationRecord],
    adjudicator_id: Optional[str] = None,
    schema: CategorySchema = DEFAULT_SCHEMA,
) -> dict[str, dict[str, Any]]:
    """Merge per-annotator records into consolidated gold labels.

    Majority vote per (sentence, category); ties fall back to the
    adjudicator's label when present, otherwise the category is dropped
    for that sentence. Dependent labels are dropped unless the
    consolidated Causality is 1.
    """
    votes: dict[str, dict[str, Counter]] = defaultdict(lambda: defaultdict(Counter))
    adjudicated: dict[str, dict[str, Any]] = defaultdict(dict)
    for record in records:
        for category, value in record.labels.items():
            votes[record.sentence_id][category][value] += 1
            if record.annotator_id == adjudicator_id:
                adjudicated[record.sentence_id][category] = value

    gold: dict[str, dict[str, Any]] = {}
    for sentence_id, by_category in votes.items():
        merged: dict[str, Any] = {}
        for category, counter in by_category.items():
            ranked = counter.most_common()
            if len(ranked) > 1 and ranked[0][1] == ranked[1][1]:
                if category in adjudicated.get(sentence_id, {}):
                    merged[category] = adjudicated[sentence_id][category]
                continue  # tie without adjudicator: category excluded
            merged[category] = ranked[0][0]
        if merged.get(CAUSALITY) != 1:
            merged = ({CAUSALITY: merged[CAUSALITY]}
                      if CAUSALITY in merged else {})
        if merged:
            schema.validate_labels(merged)
            gold[sentence_id] = merged
    return gold


def with_gold(dataset: Dataset, gold: Mapping[str, Mapping[str, Any]]) -> Dataset:
    """A copy of the dataset with the gold label map replaced."""
    return replace(dataset, gold_labels=dict(gold))
