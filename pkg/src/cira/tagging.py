"""Tagger implementations for the enrichment pipeline.

The feature pipeline only depends on the ``Tagger`` protocol; concrete
taggers live here. ``SpacyTagger`` adapts a loaded spaCy pipeline (an
optional dependency). ``LookupTagger`` serves deployments and tests that
work from a fixed table of pre-tagged sentences, e.g. exported from a
full tagger run elsewhere.
"""

from __future__ import annotations

from typing import Iterable, Mapping, Sequence

from .errors import TaggerError
from .features import TaggedToken


class SpacyTagger:
    """Adapter over a spaCy pipeline emitting universal POS tags and
    dependency labels."""

    def __init__(self, model: str = "en_core_web_sm"):
        try:
            import spacy
        except ImportError as e:
            raise TaggerError(
                "spaCy is not installed; install the 'tagging' extra or "
                "inject another tagger"
            ) from e
        try:
            self._nlp = spacy.load(model)
        except OSError as e:
            raise TaggerError(f"spaCy model {model!r} not available: {e}") from e

    def tag(self, text: str) -> list[TaggedToken]:
        doc = self._nlp(text)
        return [TaggedToken(t.text, t.pos_, t.dep_) for t in doc]


class LookupTagger:
    """Tagger backed by a fixed sentence -> tagged tokens table."""

    def __init__(self, table: Mapping[str, Sequence[TaggedToken]]):
        self._table = dict(table)

    def add(self, text: str, tokens: Iterable[TaggedToken]) -> None:
        self._table[text] = list(tokens)

    def tag(self, text: str) -> list[TaggedToken]:
        try:
            return list(self._table[text])
        except KeyError:
            raise TaggerError(
                f"no tags recorded for sentence: {text[:60]!r}"
            ) from None
