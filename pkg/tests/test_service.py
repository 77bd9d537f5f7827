import json

import pytest
from fastapi.testclient import TestClient

from cira.agreement import agreement_report
from cira.corpus import AnnotationRecord, load_corpus, save_corpus
from cira.errors import DataError
from cira.service import ServiceConfig, create_app, load_config
from cira.store import AnnotationStore, assign_tasks, export_annotations

from conftest import build_corpus


class FixedModel:
    """Deterministic classifier stand-in for service tests."""

    def predict_proba(self, texts):
        out = []
        for text in texts:
            p = 0.9 if "if" in text.lower().split() else 0.2
            out.append((p, 1 - p))
        return out


@pytest.fixture
def corpus():
    return build_corpus(12, 12, seed=21, sentences_per_doc=6)


@pytest.fixture
def store(tmp_path, corpus):
    store = AnnotationStore(tmp_path / "ann.sqlite")
    plan = assign_tasks(corpus, ["alice", "bob"], unique_per_annotator=4,
                        overlap_per_annotator=3, seed=1)
    store.install_plan(plan)
    yield store
    store.close()


@pytest.fixture
def client(corpus, store):
    app = create_app(corpus=corpus, store=store, model=FixedModel(),
                     batch_cap=16)
    return TestClient(app)


def submit(client, annotator, sentence_id, labels, cues=()):
    return client.post(
        "/annotations",
        json={"sentence_id": sentence_id, "annotator_id": annotator,
              "labels": labels, "cue_phrases": list(cues)},
        headers={"X-Annotator-Token": annotator},
    )


def drain_tasks(client, annotator, label_fn):
    """Annotate every open task; label_fn(sentence_id, text) -> labels."""
    while True:
        response = client.get("/tasks/next", params={"annotator": annotator},
                              headers={"X-Annotator-Token": annotator})
        task = response.json()["task"]
        if task is None:
            return
        labels = label_fn(task["sentence_id"], task["text"])
        assert submit(client, annotator, task["sentence_id"],
                      labels).status_code == 200


class TestAssignTasks:
    def test_arithmetic_and_disjointness(self, corpus):
        plan = assign_tasks(corpus, ["a", "b", "c"], unique_per_annotator=5,
                            overlap_per_annotator=4, seed=0)
        unique_all = [sid for ids in plan.unique_sets.values() for sid in ids]
        assert len(unique_all) == len(set(unique_all)) == 15
        assert len(plan.overlap_pool) == 4
        assert not set(unique_all) & set(plan.overlap_pool)
        for annotator in ("a", "b", "c"):
            queue = plan.queue_for(annotator)
            assert len(queue) == 9
            assert len(set(queue)) == 9  # no double assignment

    def test_required_size_in_error(self, corpus):
        with pytest.raises(DataError, match="need 6001"):
            assign_tasks(corpus, ["a", "b"], unique_per_annotator=3000,
                         overlap_per_annotator=1, seed=0)

    def test_study_scale_arithmetic(self):
        # 6 annotators at 2,500 unique + 500 shared need 15,500 distinct
        # sentences; each queue holds 3,000.
        from cira.corpus import Dataset, Sentence
        sentences = tuple(
            Sentence(id=f"d{i // 100}#{i % 100}", text=f"s {i}",
                     doc_id=f"d{i // 100}", index_in_doc=i % 100)
            for i in range(15_500)
        )
        corpus = Dataset(sentences=sentences)
        annotators = [f"a{i}" for i in range(6)]
        plan = assign_tasks(corpus, annotators, unique_per_annotator=2_500,
                            overlap_per_annotator=500, seed=1)
        used = set(plan.overlap_pool)
        for annotator in annotators:
            assert len(plan.queue_for(annotator)) == 3_000
            used.update(plan.unique_sets[annotator])
        assert len(used) == 15_500
        with pytest.raises(DataError, match="need 15500"):
            assign_tasks(corpus.subset([s.id for s in sentences[:15_499]]),
                         annotators, 2_500, 500, seed=1)

    def test_single_annotator_no_overlap(self, corpus):
        plan = assign_tasks(corpus, ["solo"], unique_per_annotator=6,
                            overlap_per_annotator=0, seed=0)
        assert len(plan.queue_for("solo")) == 6

    def test_deterministic(self, corpus):
        first = assign_tasks(corpus, ["a", "b"], 4, 2, seed=9)
        second = assign_tasks(corpus, ["a", "b"], 4, 2, seed=9)
        assert first == second


class TestStore:
    def test_submit_and_history(self, store, corpus):
        sentence_id, _ = store.next_open_task("alice")
        record = AnnotationRecord(sentence_id=sentence_id,
                                  annotator_id="alice",
                                  labels={"Causality": 1, "Marked": 1})
        assert store.submit(record) == 1
        updated = AnnotationRecord(sentence_id=sentence_id,
                                   annotator_id="alice",
                                   labels={"Causality": 0})
        assert store.submit(updated) == 2
        history = store.history("alice", sentence_id)
        assert len(history) == 2
        current = store.current_records(annotator_id="alice")
        assert current[0].labels == {"Causality": 0}

    def test_schema_enforced_at_write(self, store):
        sentence_id, _ = store.next_open_task("alice")
        bad = AnnotationRecord(sentence_id=sentence_id, annotator_id="alice",
                               labels={"Causality": 0, "Temporality": "before"})
        with pytest.raises(Exception, match="require"):
            store.submit(bad)

    def test_unassigned_sentence_rejected(self, store):
        record = AnnotationRecord(sentence_id="not-assigned",
                                  annotator_id="alice",
                                  labels={"Causality": 1})
        with pytest.raises(DataError, match="no task"):
            store.submit(record)


class TestClassifyEndpoint:
    def test_cue_and_label_in_response(self, client):
        response = client.post("/classify", json={
            "texts": ["If the process fails, an error message is shown."]})
        assert response.status_code == 200
        [result] = response.json()
        assert result["label"] == "causal"
        assert result["p_causal"] == pytest.approx(0.9)
        assert any(c["phrase"] == "if" for c in result["cues"])
        cue = [c for c in result["cues"] if c["phrase"] == "if"][0]
        assert (cue["start"], cue["end"]) == (0, 2)

    def test_empty_list(self, client):
        response = client.post("/classify", json={"texts": []})
        assert response.status_code == 200
        assert response.json() == []

    def test_batch_cap(self, client):
        response = client.post("/classify",
                               json={"texts": ["x"] * 17})
        assert response.status_code == 413

    def test_no_model_gives_503(self, corpus, store):
        app = create_app(corpus=corpus, store=store, model=None)
        with TestClient(app) as bare:
            response = bare.post("/classify", json={"texts": ["x"]})
            assert response.status_code == 503


class TestTaskFlow:
    def test_task_has_context_and_schema(self, client):
        response = client.get("/tasks/next", params={"annotator": "alice"},
                              headers={"X-Annotator-Token": "alice"})
        task = response.json()["task"]
        assert task["status"] == "open"
        assert "Causality" in task["schema"]["binary_categories"]
        assert task["schema"]["ternary_categories"]["Relationship"] == \
            ["cause", "enable", "prevent"]
        assert "predecessor" in task and "successor" in task

    def test_missing_token_unauthorized(self, client):
        response = client.get("/tasks/next", params={"annotator": "alice"})
        assert response.status_code == 401

    def test_wrong_token_forbidden(self, client):
        response = client.get("/tasks/next", params={"annotator": "alice"},
                              headers={"X-Annotator-Token": "mallory"})
        assert response.status_code == 403

    def test_submit_advances_progress(self, client):
        response = client.get("/tasks/next", params={"annotator": "alice"},
                              headers={"X-Annotator-Token": "alice"})
        task = response.json()["task"]
        before = task["progress"]["submitted"]
        result = submit(client, "alice", task["sentence_id"],
                        {"Causality": 0})
        assert result.status_code == 200
        assert result.json()["progress"]["submitted"] == before + 1

    def test_dependency_violation_names_rule(self, client):
        response = client.get("/tasks/next", params={"annotator": "alice"},
                              headers={"X-Annotator-Token": "alice"})
        task = response.json()["task"]
        result = submit(client, "alice", task["sentence_id"],
                        {"Causality": 0, "Temporality": "before"})
        assert result.status_code == 422
        assert result.json()["detail"]["rule"] == \
            "dependent-category-requires-causal"

    def test_resubmission_overwrites_with_history(self, client, store):
        response = client.get("/tasks/next", params={"annotator": "bob"},
                              headers={"X-Annotator-Token": "bob"})
        sentence_id = response.json()["task"]["sentence_id"]
        assert submit(client, "bob", sentence_id,
                      {"Causality": 1, "Marked": 1}).json()["version"] == 1
        assert submit(client, "bob", sentence_id,
                      {"Causality": 0}).json()["version"] == 2
        assert len(store.history("bob", sentence_id)) == 2

    def test_queue_drains_to_null(self, client):
        drain_tasks(client, "alice", lambda sid, text: {"Causality": 0})
        response = client.get("/tasks/next", params={"annotator": "alice"},
                              headers={"X-Annotator-Token": "alice"})
        assert response.json()["task"] is None


def causal_label_fn(sid, text):
    if "if" in text.lower().split() or "when" in text.lower().split():
        return {"Causality": 1, "Marked": 1, "Explicit": 1,
                "Relationship": "cause", "Temporality": "before"}
    return {"Causality": 0}


class TestExportAndAgreement:
    def test_round_trip_through_corpus_format(self, client, corpus, store,
                                              tmp_path):
        drain_tasks(client, "alice", causal_label_fn)
        drain_tasks(client, "bob", causal_label_fn)
        response = client.get("/export")
        assert response.status_code == 200
        path = tmp_path / "export.jsonl"
        path.write_text(response.text)
        loaded = load_corpus(path)
        direct = export_annotations(store, corpus)
        assert {s.id for s in loaded.sentences} == \
            {s.id for s in direct.sentences}
        assert loaded.gold_labels == direct.gold_labels
        # save -> load round trip preserves the export exactly
        second = tmp_path / "again.jsonl"
        save_corpus(loaded, second)
        assert load_corpus(second).gold_labels == loaded.gold_labels

    def test_overlap_only_excludes_unique_sentences(self, client, corpus,
                                                    store):
        drain_tasks(client, "alice", causal_label_fn)
        drain_tasks(client, "bob", causal_label_fn)
        overlap = export_annotations(store, corpus, overlap_only=True)
        everything = export_annotations(store, corpus)
        assert 0 < len(overlap) < len(everything)
        response = client.get("/export", params={"overlap_only": "true"})
        lines = [json.loads(l) for l in response.text.splitlines()]
        assert {row["id"] for row in lines} == {s.id for s in overlap.sentences}

    def test_empty_export_warns(self, client):
        response = client.get("/export")
        assert response.text == ""
        assert response.headers["X-Export-Warning"] == "no submitted records"

    def test_agreement_matches_direct_computation(self, client, store):
        drain_tasks(client, "alice", causal_label_fn)
        drain_tasks(client, "bob", causal_label_fn)
        payload = client.get("/agreement").json()
        records = store.current_records(overlap_only=True)
        report = agreement_report(records)
        by_category = {row["category"]: row for row in payload["categories"]}
        for row in report.rows:
            served = by_category[row.category]
            assert served["agreement"] == pytest.approx(row.agreement)
            assert served["cohens_kappa"] == pytest.approx(row.kappa)
            assert served["gwets_ac1"] == pytest.approx(row.ac1)
            assert served["band"] == row.band
        assert payload["averages"]["gwets_ac1"] == \
            pytest.approx(report.average_ac1)

    def test_agreement_without_overlap_404(self, client):
        assert client.get("/agreement").status_code == 404


class TestLexiconEndpoint:
    def test_entries_served(self, client):
        entries = client.get("/lexicon").json()
        assert len(entries) == 84
        by_phrase = {e["phrase"]: e for e in entries}
        assert by_phrase["if"]["grammatical_type"] == "conjunction"
        assert set(by_phrase["prevent(s/ed)"]["surface_forms"]) == \
            {"prevent", "prevents", "prevented"}


class TestConfig:
    def test_file_plus_env_overrides(self, tmp_path, monkeypatch):
        path = tmp_path / "config.json"
        path.write_text(json.dumps({
            "corpus_path": "corpus.jsonl", "port": 9000,
            "classify_enabled": False}))
        monkeypatch.setenv("CIRA_PORT", "9100")
        monkeypatch.setenv("CIRA_STORE_PATH", "/tmp/other.sqlite")
        config = load_config(path)
        assert config.port == 9100
        assert config.store_path == "/tmp/other.sqlite"
        assert config.corpus_path == "corpus.jsonl"
        assert config.classify_enabled is False

    def test_unknown_key_rejected(self, tmp_path):
        path = tmp_path / "config.json"
        path.write_text(json.dumps({"portt": 1}))
        with pytest.raises(DataError, match="unknown config keys"):
            load_config(path)

    def test_classify_enabled_requires_model(self, tmp_path, corpus):
        from cira.service import build_app
        corpus_path = tmp_path / "c.jsonl"
        save_corpus(corpus, corpus_path)
        config = ServiceConfig(corpus_path=str(corpus_path),
                               store_path=str(tmp_path / "s.sqlite"),
                               classify_enabled=True, model_path=None)
        with pytest.raises(DataError, match="model_path"):
            build_app(config)

    def test_build_app_without_classify(self, tmp_path, corpus):
        from cira.service import build_app
        corpus_path = tmp_path / "c.jsonl"
        save_corpus(corpus, corpus_path)
        config = ServiceConfig(
            corpus_path=str(corpus_path),
            store_path=str(tmp_path / "s.sqlite"),
            classify_enabled=False,
            annotators=["a"], unique_per_annotator=2,
            overlap_per_annotator=1, assign_seed=3,
        )
        app = build_app(config)
        with TestClient(app) as test_client:
            assert test_client.get("/health").json()["model_loaded"] is False
            task = test_client.get(
                "/tasks/next", params={"annotator": "a"},
                headers={"X-Annotator-Token": "a"}).json()["task"]
            assert task is not None
