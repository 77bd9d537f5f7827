"""HTTP service: classification, annotation tasks, agreement, export.

JSON over HTTP; see the endpoint handlers for the wire shapes. The
classifier model handle lives on the application state and is swapped
atomically, so classification stays read-only and concurrent-safe while
annotation writes are serialized by the store.

Configuration comes from a JSON file whose keys can each be overridden by
an environment variable of the same name, uppercased with a CIRA_ prefix
(model_path -> CIRA_MODEL_PATH).
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Any, Optional, Sequence

from fastapi import FastAPI, Header, HTTPException, Query
from fastapi.responses import PlainTextResponse, StreamingResponse
from pydantic import BaseModel

from . import agreement as agreement_module
from .corpus import (AnnotationRecord, DEFAULT_SCHEMA, Dataset, load_corpus,
                     sentence_context)
from .errors import DataError, SchemaViolation
from .lexicon import CuePhraseEntry, build_matcher, default_lexicon, load_lexicon
from .matching import PhraseMatcher
from .store import AnnotationStore, assign_tasks, export_annotations

ENV_PREFIX = "CIRA_"


@dataclass
class ServiceConfig:
    corpus_path: str = ""
    store_path: str = "annotations.sqlite"
    model_path: Optional[str] = None
    lexicon_path: Optional[str] = None
    host: str = "127.0.0.1"
    port: int = 8000
    classify_enabled: bool = True
    batch_cap: int = 256
    annotators: list[str] = field(default_factory=list)
    unique_per_annotator: int = 0
    overlap_per_annotator: int = 0
    assign_seed: int = 0
    adjudicator_id: Optional[str] = None
    spacy_model: Optional[str] = None


def load_config(path: Optional[str | Path] = None) -> ServiceConfig:
    """Read the JSON config file, then apply CIRA_* overrides."""
    raw: dict[str, Any] = {}
    if path is not None:
        with Path(path).open("r", encoding="utf-8") as fh:
            raw = json.load(fh)
    config = ServiceConfig()
    valid = {f.name: f.type for f in fields(ServiceConfig)}
    unknown = sorted(set(raw) - set(valid))
    if unknown:
        raise DataError(f"unknown config keys: {unknown}")
    for key, value in raw.items():
        setattr(config, key, value)
    for f in fields(ServiceConfig):
        env = os.environ.get(ENV_PREFIX + f.name.upper())
        if env is None:
            continue
        if f.name in ("port", "batch_cap", "unique_per_annotator",
                      "overlap_per_annotator", "assign_seed"):
            setattr(config, f.name, int(env))
        elif f.name == "classify_enabled":
            setattr(config, f.name, env.lower() in ("1", "true", "yes"))
        elif f.name == "annotators":
            setattr(config, f.name, [a for a in env.split(",") if a])
        else:
            setattr(config, f.name, env)
    return config


class ClassifyRequest(BaseModel):
    texts: list[str]


class AnnotationPayload(BaseModel):
    sentence_id: str
    annotator_id: str
    labels: dict[str, Any]
    cue_phrases: list[str] = []


def _task_payload(corpus: Dataset, store: AnnotationStore,
                  annotator_id: str) -> Optional[dict]:
    nxt = store.next_open_task(annotator_id)
    if nxt is None:
        return None
    sentence_id, is_overlap = nxt
    predecessor, sentence, successor = sentence_context(corpus, sentence_id)
    return {
        "annotator_id": annotator_id,
        "sentence_id": sentence_id,
        "text": sentence.text,
        "predecessor": predecessor.text if predecessor else None,
        "successor": successor.text if successor else None,
        "is_overlap": is_overlap,
        "status": "open",
        "schema": {
            "binary_categories": list(DEFAULT_SCHEMA.binary_categories),
            "ternary_categories": {
                k: list(v)
                for k, v in DEFAULT_SCHEMA.ternary_categories.items()
            },
        },
        "progress": store.progress(annotator_id),
    }


def create_app(
    corpus: Dataset,
    store: AnnotationStore,
    lexicon: Optional[Sequence[CuePhraseEntry]] = None,
    model=None,
    tagger=None,
    batch_cap: int = 256,
    adjudicator_id: Optional[str] = None,
) -> FastAPI:
    """Assemble the application from ready-made components.

    ``model`` is any object with ``predict_proba(texts)`` returning
    (p_causal, p_not_causal) pairs; None disables /classify with a 503.
    """
    lexicon = tuple(lexicon if lexicon is not None else default_lexicon())
    matcher: PhraseMatcher = build_matcher(lexicon)

    app = FastAPI(title="cira", version="0.1.0")
    app.state.corpus = corpus
    app.state.store = store
    app.state.model = model
    app.state.tagger = tagger
    app.state.lexicon = lexicon
    app.state.matcher = matcher
    app.state.batch_cap = batch_cap
    app.state.adjudicator_id = adjudicator_id

    @app.get("/health")
    def health():
        from .matching import KERNEL
        return {
            "status": "ok",
            "model_loaded": app.state.model is not None,
            "sentences": len(app.state.corpus),
            "matching_kernel": KERNEL,
        }

    @app.post("/classify")
    def classify(request: ClassifyRequest):
        if app.state.model is None:
            raise HTTPException(
                status_code=503, detail="no model loaded; classification "
                "is unavailable"
            )
        if len(request.texts) > app.state.batch_cap:
            raise HTTPException(
                status_code=413,
                detail=f"batch of {len(request.texts)} exceeds the cap of "
                f"{app.state.batch_cap}",
            )
        model = app.state.model  # read once: atomic swap point
        probabilities = model.predict_proba(request.texts)
        out = []
        for text, (p_causal, p_not) in zip(request.texts, probabilities):
            hits = app.state.matcher.match(text)
            out.append({
                "label": "causal" if p_causal > p_not else "not_causal",
                "p_causal": p_causal,
                "cues": [
                    {"phrase": entry.phrase, "start": span[0], "end": span[1]}
                    for entry, span in hits
                ],
            })
        return out

    @app.get("/tasks/next")
    def next_task(
        annotator: str = Query(...),
        x_annotator_token: Optional[str] = Header(default=None),
    ):
        _check_token(x_annotator_token, annotator)
        return {"task": _task_payload(app.state.corpus, app.state.store,
                                      annotator)}

    @app.post("/annotations")
    def submit_annotation(
        payload: AnnotationPayload,
        x_annotator_token: Optional[str] = Header(default=None),
    ):
        _check_token(x_annotator_token, payload.annotator_id)
        if payload.sentence_id not in app.state.corpus:
            raise HTTPException(status_code=404,
                                detail=f"unknown sentence {payload.sentence_id!r}")
        record = AnnotationRecord(
            sentence_id=payload.sentence_id,
            annotator_id=payload.annotator_id,
            labels=payload.labels,
            cue_phrases=tuple(payload.cue_phrases),
        )
        try:
            version = app.state.store.submit(record)
        except SchemaViolation as e:
            raise HTTPException(
                status_code=422,
                detail={"rule": e.rule, "message": str(e)},
            ) from None
        except DataError as e:
            raise HTTPException(status_code=404, detail=str(e)) from None
        return {
            "status": "ok",
            "version": version,
            "progress": app.state.store.progress(payload.annotator_id),
        }

    @app.get("/agreement")
    def agreement_endpoint():
        records = app.state.store.current_records(overlap_only=True)
        try:
            report = agreement_module.agreement_report(records)
        except DataError as e:
            raise HTTPException(status_code=404, detail=str(e)) from None
        return {
            "categories": [
                {
                    "category": row.category,
                    "matrix": [list(r) for r in row.table.counts],
                    "n": row.table.n,
                    "agreement": row.agreement,
                    "cohens_kappa": row.kappa,
                    "gwets_ac1": row.ac1,
                    "band": row.band,
                }
                for row in report.rows
            ],
            "averages": {
                "agreement": report.average_agreement,
                "cohens_kappa": report.average_kappa,
                "gwets_ac1": report.average_ac1,
            },
        }

    @app.get("/export")
    def export(
        overlap_only: bool = Query(default=False),
        annotator: Optional[str] = Query(default=None),
    ):
        exported = export_annotations(
            app.state.store, app.state.corpus,
            overlap_only=overlap_only, annotator_id=annotator,
            adjudicator_id=app.state.adjudicator_id,
        )
        headers = {}
        if len(exported) == 0:
            headers["X-Export-Warning"] = "no submitted records"

        def stream():
            for sentence in exported.sentences:
                yield json.dumps({
                    "id": sentence.id,
                    "doc_id": sentence.doc_id,
                    "index_in_doc": sentence.index_in_doc,
                    "domain": sentence.domain,
                    "year": sentence.year,
                    "text": sentence.text,
                    "labels": dict(exported.labels_for(sentence.id)),
                    "cue_phrases": list(
                        exported.cue_phrases.get(sentence.id, ())),
                }, ensure_ascii=False) + "\n"

        return StreamingResponse(stream(), media_type="application/jsonl",
                                 headers=headers)

    @app.get("/agreement.csv", response_class=PlainTextResponse)
    def agreement_csv():
        records = app.state.store.current_records(overlap_only=True)
        try:
            report = agreement_module.agreement_report(records)
        except DataError as e:
            raise HTTPException(status_code=404, detail=str(e)) from None
        return agreement_module.report_to_csv(report)

    @app.get("/lexicon")
    def lexicon_endpoint():
        return [
            {
                "phrase": entry.phrase,
                "grammatical_type": entry.grammatical_type,
                "relation_group": entry.relation_group,
                "surface_forms": list(entry.surface_forms),
            }
            for entry in app.state.lexicon
        ]

    return app


def _check_token(token: Optional[str], annotator_id: str) -> None:
    if token is None:
        raise HTTPException(status_code=401,
                            detail="missing X-Annotator-Token header")
    if token != annotator_id:
        raise HTTPException(status_code=403,
                            detail="token does not match annotator")


def build_app(config: ServiceConfig) -> FastAPI:
    """Assemble the application from a config: load corpus, store, lexicon,
    optional model checkpoint, and install the task plan if configured."""
    if not config.corpus_path:
        raise DataError("config needs corpus_path")
    corpus = load_corpus(config.corpus_path)
    store = AnnotationStore(config.store_path)
    lexicon = (load_lexicon(config.lexicon_path)
               if config.lexicon_path else default_lexicon())

    model = None
    tagger = None
    if config.model_path:
        from .transformer import load_model

        manifest = json.loads(
            (Path(config.model_path) / "manifest.json").read_text())
        if manifest["variant"] in ("pos", "dep"):
            from .tagging import SpacyTagger

            tagger = SpacyTagger(config.spacy_model or "en_core_web_sm")
        model = load_model(config.model_path, tagger=tagger)
    elif config.classify_enabled:
        raise DataError(
            "classification is enabled but no model_path is configured; "
            "set model_path or classify_enabled=false"
        )

    if config.annotators and not store.has_tasks():
        plan = assign_tasks(
            corpus, config.annotators, config.unique_per_annotator,
            config.overlap_per_annotator, config.assign_seed,
        )
        store.install_plan(plan)

    return create_app(
        corpus=corpus, store=store, lexicon=lexicon, model=model,
        tagger=tagger, batch_cap=config.batch_cap,
        adjudicator_id=config.adjudicator_id,
    )
