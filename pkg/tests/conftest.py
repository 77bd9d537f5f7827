"""Shared fixtures: synthetic corpora and a lookup tagger for the
enrichment tests."""

from __future__ import annotations

import random

import pytest

from cira.corpus import Dataset, Sentence
from cira.features import TaggedToken
from cira.tagging import LookupTagger

NOUNS = ["system", "process", "sensor", "display", "valve", "pump",
         "network", "module", "router", "server", "gateway", "actuator"]

# Causal templates always contain at least one lexicon cue phrase.
CAUSAL_TEMPLATES = [
    "if the {a} fails, the {b} shall stop",
    "when the {a} starts, the {b} is shown",
    "the {a} restarts because the {b} failed",
    "as long as the {a} runs, the {b} stays active",
    "the {a} prevents the {b} from overheating",
    "once the {a} is armed, the {b} raises an alarm",
    "the {a} shall reduce the load on the {b}",
    "whenever the {a} reboots, the {b} logs an event",
]

# Non-causal templates avoid every lexicon surface form.
PLAIN_TEMPLATES = [
    "the {a} has a red {b}",
    "a {a} is mounted on the {b}",
    "the {a} weighs ten kilograms",
    "the {b} contains three {a} modules",
    "every {a} includes a {b}",
    "the {a} consists of steel plates",
    "this {a} is an old {b}",
    "the {a} panel shows its serial number",
]


def build_corpus(n_causal: int, n_non_causal: int, seed: int = 0,
                 sentences_per_doc: int = 20,
                 with_dependent_labels: bool = False) -> Dataset:
    """Synthetic labeled corpus; causal sentences carry cue phrases."""
    rng = random.Random(seed)
    rows = []
    for kind, count in (("causal", n_causal), ("plain", n_non_causal)):
        templates = CAUSAL_TEMPLATES if kind == "causal" else PLAIN_TEMPLATES
        for i in range(count):
            a, b = rng.choice(NOUNS), rng.choice(NOUNS)
            text = templates[i % len(templates)].format(a=a, b=b)
            rows.append((f"{kind}-{i}", text, 1 if kind == "causal" else 0))
    rng.shuffle(rows)

    sentences, gold = [], {}
    for position, (uid, text, label) in enumerate(rows):
        doc_id = f"doc-{position // sentences_per_doc:04d}"
        index_in_doc = position % sentences_per_doc
        sid = f"{doc_id}#{index_in_doc}"
        sentences.append(Sentence(
            id=sid, text=f"{text} [{uid}]", doc_id=doc_id,
            index_in_doc=index_in_doc, domain="synthetic", year=2020,
        ))
        labels = {"Causality": label}
        if with_dependent_labels and label == 1:
            labels.update({
                "Explicit": position % 2,
                "Marked": 1,
                "Relationship": ("cause", "enable", "prevent")[position % 3],
                "Temporality": ("before", "overlap", "during")[position % 3],
            })
        gold[sid] = labels
    return Dataset(sentences=tuple(sentences), gold_labels=gold,
                   provenance={"generator": "conftest.build_corpus",
                               "seed": seed})


@pytest.fixture
def small_corpus() -> Dataset:
    return build_corpus(30, 70, seed=11)


@pytest.fixture
def balanced_corpus() -> Dataset:
    return build_corpus(60, 60, seed=5)


# The running example sentence with its full tag assignment, for the
# enrichment contract tests.
EXAMPLE_SENTENCE = "If the process fails, an error message is shown."
EXAMPLE_TAGS = [
    ("If", "SCONJ", "mark"),
    ("the", "DET", "det"),
    ("process", "NOUN", "nsubj"),
    ("fails", "VERB", "advcl"),
    (",", "PUNCT", "punct"),
    ("an", "DET", "det"),
    ("error", "NOUN", "compound"),
    ("message", "NOUN", "nsubjpass"),
    ("is", "AUX", "auxpass"),
    ("shown", "VERB", "ROOT"),
    (".", "PUNCT", "punct"),
]
EXAMPLE_POS = ("If_SCONJ the_DET process_NOUN fails_VERB ,_PUNCT an_DET "
               "error_NOUN message_NOUN is_AUX shown_VERB ._PUNCT")
EXAMPLE_DEP = ("If_mark the_det process_nsubj fails_advcl ,_punct an_det "
               "error_compound message_nsubjpass is_auxpass shown_ROOT "
               "._punct")


@pytest.fixture
def example_tagger() -> LookupTagger:
    return LookupTagger({
        EXAMPLE_SENTENCE: [TaggedToken(s, p, d) for s, p, d in EXAMPLE_TAGS],
    })


class WordSplitTagger:
    """Deterministic tagger for fuzz tests: whitespace tokens, cyclic tags."""

    POS_TAGS = ("NOUN", "VERB", "DET", "ADJ", "PUNCT", "AUX")
    DEP_TAGS = ("nsubj", "obj", "det", "amod", "punct", "ROOT")

    def tag(self, text: str):
        tokens = text.split()
        return [
            TaggedToken(tok, self.POS_TAGS[i % len(self.POS_TAGS)],
                        self.DEP_TAGS[i % len(self.DEP_TAGS)])
            for i, tok in enumerate(tokens)
        ]


@pytest.fixture
def fuzz_tagger() -> WordSplitTagger:
    return WordSplitTagger()
