"""Annotation persistence and task assignment.

A single-file SQLite store keyed by (annotator, sentence, version) holds
tasks and submitted records. Resubmission appends a new version (last
write wins; history is kept). Writes are serialized through one lock,
which trivially satisfies the per-(annotator, sentence) ordering
requirement; reads take consistent snapshots.
"""

from __future__ import annotations

import datetime as _dt
import json
import random
import sqlite3
import threading
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

from .corpus import (AnnotationRecord, CategorySchema, DEFAULT_SCHEMA,
                     Dataset)
from .errors import DataError

_SCHEMA_SQL = """
CREATE TABLE IF NOT EXISTS tasks (
    annotator_id TEXT NOT NULL,
    sentence_id  TEXT NOT NULL,
    is_overlap   INTEGER NOT NULL DEFAULT 0,
    status       TEXT NOT NULL DEFAULT 'open',
    position     INTEGER NOT NULL,
    PRIMARY KEY (annotator_id, sentence_id)
);
CREATE TABLE IF NOT EXISTS annotations (
    annotator_id TEXT NOT NULL,
    sentence_id  TEXT NOT NULL,
    version      INTEGER NOT NULL,
    labels       TEXT NOT NULL,
    cue_phrases  TEXT NOT NULL,
    created_at   TEXT NOT NULL,
    PRIMARY KEY (annotator_id, sentence_id, version)
);
"""


@dataclass(frozen=True)
class TaskPlan:
    """Who annotates what: disjoint unique sets plus one shared overlap
    pool."""

    unique_sets: dict[str, tuple[str, ...]]
    overlap_pool: tuple[str, ...]
    seed: int

    @property
    def annotators(self) -> tuple[str, ...]:
        return tuple(self.unique_sets)

    def queue_for(self, annotator_id: str) -> tuple[str, ...]:
        return self.unique_sets[annotator_id] + self.overlap_pool


def assign_tasks(
    corpus: Dataset,
    annotators: Sequence[str],
    unique_per_annotator: int,
    overlap_per_annotator: int,
    seed: int,
) -> TaskPlan:
    """Draw disjoint unique sets and a shared overlap pool from the corpus.

    Deterministic for a fixed seed. The overlap pool is assigned to every
    annotator, so each queue holds unique_per_annotator +
    overlap_per_annotator sentences and no sentence twice.
    """
    if not annotators:
        raise DataError("no annotators given")
    if len(set(annotators)) != len(annotators):
        raise DataError("duplicate annotator ids")
    required = len(annotators) * unique_per_annotator + overlap_per_annotator
    if required > len(corpus):
        raise DataError(
            f"corpus too small: need {required} sentences "
            f"({len(annotators)} annotators x {unique_per_annotator} unique "
            f"+ {overlap_per_annotator} shared), have {len(corpus)}"
        )
    ids = [s.id for s in corpus.sentences]
    rng = random.Random(seed)
    rng.shuffle(ids)
    overlap = tuple(ids[:overlap_per_annotator])
    cursor = overlap_per_annotator
    unique_sets = {}
    for annotator in annotators:
        unique_sets[annotator] = tuple(ids[cursor:cursor + unique_per_annotator])
        cursor += unique_per_annotator
    return TaskPlan(unique_sets=unique_sets, overlap_pool=overlap, seed=seed)


class AnnotationStore:
    def __init__(self, path: str | Path):
        self._path = str(path)
        self._lock = threading.Lock()
        self._conn = sqlite3.connect(self._path, check_same_thread=False)
        self._conn.executescript(_SCHEMA_SQL)
        self._conn.commit()

    def close(self) -> None:
        self._conn.close()

    # -- tasks --------------------------------------------------------

    def install_plan(self, plan: TaskPlan) -> None:
        with self._lock:
            for annotator in plan.annotators:
                overlap = set(plan.overlap_pool)
                for position, sentence_id in enumerate(plan.queue_for(annotator)):
                    self._conn.execute(
                        "INSERT OR IGNORE INTO tasks "
                        "(annotator_id, sentence_id, is_overlap, status, position) "
                        "VALUES (?, ?, ?, 'open', ?)",
                        (annotator, sentence_id,
                         int(sentence_id in overlap), position),
                    )
            self._conn.commit()

    def has_tasks(self) -> bool:
        row = self._conn.execute("SELECT COUNT(*) FROM tasks").fetchone()
        return row[0] > 0

    def next_open_task(self, annotator_id: str) -> Optional[tuple[str, bool]]:
        """(sentence_id, is_overlap) of the next open task, queue order."""
        row = self._conn.execute(
            "SELECT sentence_id, is_overlap FROM tasks "
            "WHERE annotator_id = ? AND status = 'open' "
            "ORDER BY position LIMIT 1",
            (annotator_id,),
        ).fetchone()
        if row is None:
            return None
        return row[0], bool(row[1])

    def task_status(self, annotator_id: str, sentence_id: str) -> Optional[str]:
        row = self._conn.execute(
            "SELECT status FROM tasks WHERE annotator_id = ? AND sentence_id = ?",
            (annotator_id, sentence_id),
        ).fetchone()
        return row[0] if row else None

    def progress(self, annotator_id: str) -> dict[str, int]:
        rows = self._conn.execute(
            "SELECT status, COUNT(*) FROM tasks WHERE annotator_id = ? "
            "GROUP BY status",
            (annotator_id,),
        ).fetchall()
        counts = {status: count for status, count in rows}
        return {
            "submitted": counts.get("submitted", 0),
            "open": counts.get("open", 0),
            "total": sum(counts.values()),
        }

    # -- annotations ---------------------------------------------------

    def submit(self, record: AnnotationRecord,
               schema: CategorySchema = DEFAULT_SCHEMA,
               require_task: bool = True) -> int:
        """Persist a record atomically; returns the stored version.

        The record must satisfy the schema rules; resubmission appends a
        new version and the task stays marked submitted.
        """
        record.validate(schema)
        with self._lock:
            if require_task:
                status = self.task_status(record.annotator_id,
                                          record.sentence_id)
                if status is None:
                    raise DataError(
                        f"no task for annotator {record.annotator_id!r} on "
                        f"sentence {record.sentence_id!r}"
                    )
            row = self._conn.execute(
                "SELECT MAX(version) FROM annotations "
                "WHERE annotator_id = ? AND sentence_id = ?",
                (record.annotator_id, record.sentence_id),
            ).fetchone()
            version = (row[0] or 0) + 1
            timestamp = record.timestamp or \
                _dt.datetime.now(_dt.timezone.utc).isoformat()
            self._conn.execute(
                "INSERT INTO annotations "
                "(annotator_id, sentence_id, version, labels, cue_phrases, "
                "created_at) VALUES (?, ?, ?, ?, ?, ?)",
                (record.annotator_id, record.sentence_id, version,
                 json.dumps(dict(record.labels), sort_keys=True),
                 json.dumps(list(record.cue_phrases)), timestamp),
            )
            self._conn.execute(
                "UPDATE tasks SET status = 'submitted' "
                "WHERE annotator_id = ? AND sentence_id = ?",
                (record.annotator_id, record.sentence_id),
            )
            self._conn.commit()
            return version

    def history(self, annotator_id: str, sentence_id: str
                ) -> list[AnnotationRecord]:
        rows = self._conn.execute(
            "SELECT labels, cue_phrases, created_at FROM annotations "
            "WHERE annotator_id = ? AND sentence_id = ? ORDER BY version",
            (annotator_id, sentence_id),
        ).fetchall()
        return [self._to_record(annotator_id, sentence_id, *row)
                for row in rows]

    def current_records(
        self,
        overlap_only: bool = False,
        annotator_id: Optional[str] = None,
    ) -> list[AnnotationRecord]:
        """Latest version of every submitted record, optionally filtered."""
        query = (
            "SELECT a.annotator_id, a.sentence_id, a.labels, a.cue_phrases, "
            "a.created_at FROM annotations a "
            "JOIN (SELECT annotator_id, sentence_id, MAX(version) AS v "
            "      FROM annotations GROUP BY annotator_id, sentence_id) m "
            "ON a.annotator_id = m.annotator_id "
            "AND a.sentence_id = m.sentence_id AND a.version = m.v"
        )
        conditions, params = [], []
        if overlap_only:
            conditions.append(
                "EXISTS (SELECT 1 FROM tasks t WHERE "
                "t.annotator_id = a.annotator_id AND "
                "t.sentence_id = a.sentence_id AND t.is_overlap = 1)"
            )
        if annotator_id is not None:
            conditions.append("a.annotator_id = ?")
            params.append(annotator_id)
        if conditions:
            query += " WHERE " + " AND ".join(conditions)
        query += " ORDER BY a.sentence_id, a.annotator_id"
        rows = self._conn.execute(query, params).fetchall()
        return [
            self._to_record(annotator, sentence, labels, cues, created)
            for annotator, sentence, labels, cues, created in rows
        ]

    @staticmethod
    def _to_record(annotator_id, sentence_id, labels, cue_phrases,
                   created_at) -> AnnotationRecord:
        return AnnotationRecord(
            sentence_id=sentence_id,
            annotator_id=annotator_id,
            labels=json.loads(labels),
            cue_phrases=tuple(json.loads(cue_phrases)),
            timestamp=created_at,
        )


def export_annotations(
    store: AnnotationStore,
    corpus: Dataset,
    overlap_only: bool = False,
    annotator_id: Optional[str] = None,
    adjudicator_id: Optional[str] = None,
) -> Dataset:
    """Corpus-format snapshot of the submitted annotations.

    Labels are consolidated by majority vote (adjudicator breaks ties);
    cue phrases are the sorted union across annotators. Only annotated
    sentences are included.
    """
    from .corpus import consolidate_gold

    records = store.current_records(overlap_only=overlap_only,
                                    annotator_id=annotator_id)
    gold = consolidate_gold(records, adjudicator_id=adjudicator_id)
    cue_union: dict[str, set] = {}
    for record in records:
        if record.cue_phrases:
            cue_union.setdefault(record.sentence_id, set()).update(
                record.cue_phrases)
    ids = [sid for sid in gold if sid in corpus]
    subset = corpus.subset(ids, note={"export": {
        "overlap_only": overlap_only, "annotator": annotator_id}})
    return Dataset(
        sentences=subset.sentences,
        gold_labels={sid: gold[sid] for sid in ids},
        cue_phrases={sid: tuple(sorted(cue_union.get(sid, ())))
                     for sid in ids if cue_union.get(sid)},
        provenance=dict(subset.provenance),
    )
