"""Sentence featurization for the classifier families.

Shallow models consume bag-of-words or TF-IDF vectors over a vocabulary
fitted on training data only. The transformer variants consume either the
raw sentence (base) or a linguistically enriched rendering where every
token carries its part-of-speech or dependency tag ("If_SCONJ the_DET ..."
/ "If_mark the_det ..."), annotated as plain text before subword
tokenization so the tag travels with the word.

Taggers and subword tokenizers are injected: anything emitting the
universal POS inventory and the usual dependency labels qualifies, and
any tokenizer exposing ids plus the special classification/separator/
padding tokens works.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Protocol, Sequence, Union

import numpy as np
from scipy import sparse

from .corpus import Dataset
from .errors import DataError, TaggerError
from .matching import tokenize

ENRICH_MODES = ("pos", "dep")
SEQUENCE_LENGTHS = (128, 384)


@dataclass(frozen=True)
class TaggedToken:
    surface: str
    pos: str
    dep: str

    def __post_init__(self):
        if not self.surface:
            raise DataError("tagged token with empty surface")


class Tagger(Protocol):
    def tag(self, text: str) -> Sequence[TaggedToken]: ...


class SubwordTokenizer(Protocol):
    pad_id: int
    cls_id: int
    sep_id: int

    def encode_ids(self, text: str) -> list[int]:
        """Subword ids for ``text``, without special tokens."""


# ---------------------------------------------------------------------------
# Vocabulary, BoW, TF-IDF

@dataclass(frozen=True)
class Vocabulary:
    index: dict[str, int]
    document_frequencies: dict[str, int]
    corpus_size: int
    idf: np.ndarray = field(repr=False, default=None)

    def __post_init__(self):
        if self.idf is None:
            idf = np.zeros(len(self.index))
            for term, i in self.index.items():
                idf[i] = math.log(
                    (1 + self.corpus_size)
                    / (1 + self.document_frequencies[term])
                ) + 1.0
            object.__setattr__(self, "idf", idf)

    def __len__(self) -> int:
        return len(self.index)


def fit_vocabulary(corpus: Union[Dataset, Iterable[str]]) -> Vocabulary:
    """Vocabulary over lowercased word tokens of the given texts.

    Fit this on the training split only; transforms never mutate it.
    """
    texts = [s.text for s in corpus.sentences] \
        if isinstance(corpus, Dataset) else list(corpus)
    if not texts:
        raise DataError("cannot fit a vocabulary on an empty corpus")
    df: dict[str, int] = {}
    for text in texts:
        for term in set(tokenize(text)):
            df[term] = df.get(term, 0) + 1
    index = {term: i for i, term in enumerate(sorted(df))}
    return Vocabulary(index=index, document_frequencies=df,
                      corpus_size=len(texts))


def _count_terms(text: str, vocabulary: Vocabulary) -> dict[int, int]:
    counts: dict[int, int] = {}
    index = vocabulary.index
    for term in tokenize(text):
        i = index.get(term)
        if i is not None:
            counts[i] = counts.get(i, 0) + 1
    return counts


def bow_vector(text: str, vocabulary: Vocabulary) -> sparse.csr_matrix:
    """1 x |V| term-count row; out-of-vocabulary tokens are ignored."""
    counts = _count_terms(text, vocabulary)
    cols = sorted(counts)
    return sparse.csr_matrix(
        ([counts[c] for c in cols], ([0] * len(cols), cols)),
        shape=(1, len(vocabulary)), dtype=np.float64,
    )


def tfidf_vector(text: str, vocabulary: Vocabulary) -> sparse.csr_matrix:
    """1 x |V| tf*idf row, L2-normalized (idf = ln((1+N)/(1+df)) + 1)."""
    row = bow_vector(text, vocabulary)
    row.data *= vocabulary.idf[row.indices]
    norm = math.sqrt(float((row.data ** 2).sum()))
    if norm > 0:
        row.data /= norm
    return row


def transform(texts: Sequence[str], vocabulary: Vocabulary,
              embedding: str) -> sparse.csr_matrix:
    """Stacked feature rows for a batch of texts."""
    if embedding == "bow":
        rows = [bow_vector(t, vocabulary) for t in texts]
    elif embedding == "tfidf":
        rows = [tfidf_vector(t, vocabulary) for t in texts]
    else:
        raise DataError(f"unknown embedding {embedding!r}; expected bow|tfidf")
    if not rows:
        return sparse.csr_matrix((0, len(vocabulary)), dtype=np.float64)
    return sparse.vstack(rows, format="csr")


# ---------------------------------------------------------------------------
# Linguistic enrichment

def enrich(text: str, mode: str, tagger: Tagger) -> str:
    """Render every token as ``surface_TAG`` joined by single spaces.

    ``mode`` selects part-of-speech ("pos") or dependency ("dep") tags;
    punctuation tokens are kept (",_PUNCT").
    """
    if mode not in ENRICH_MODES:
        raise DataError(f"unknown enrichment mode {mode!r}; expected pos|dep")
    if not text:
        return ""
    try:
        tagged = tagger.tag(text)
    except TaggerError:
        raise
    except Exception as e:
        raise TaggerError(f"tagger failed on {text!r}: {e}") from e
    return " ".join(
        f"{t.surface}_{t.pos if mode == 'pos' else t.dep}" for t in tagged
    )


def strip_tags(enriched: str) -> list[str]:
    """Recover the tagger's token sequence from an enriched rendering."""
    return [part.rsplit("_", 1)[0] for part in enriched.split(" ") if part]


# ---------------------------------------------------------------------------
# Transformer input encoding

@dataclass(frozen=True)
class EncodedSequence:
    token_ids: tuple[int, ...]
    attention_mask: tuple[int, ...]
    length: int
    truncated: bool = False

    def __post_init__(self):
        if len(self.token_ids) != self.length or \
                len(self.attention_mask) != self.length:
            raise DataError("encoded sequence length mismatch")


def encode_for_transformer(
    text: str, max_len: int, tokenizer: SubwordTokenizer
) -> EncodedSequence:
    """Fixed-length id sequence: [CLS] subwords [SEP] padding.

    The classification token sits at position 0; sequences longer than
    ``max_len`` are truncated at subword granularity, shorter ones padded.
    """
    if max_len not in SEQUENCE_LENGTHS:
        raise DataError(
            f"max_len must be one of {SEQUENCE_LENGTHS}, got {max_len}"
        )
    subword_ids = tokenizer.encode_ids(text)
    truncated = len(subword_ids) > max_len - 2
    if truncated:
        subword_ids = subword_ids[: max_len - 2]
    ids = [tokenizer.cls_id, *subword_ids, tokenizer.sep_id]
    mask = [1] * len(ids)
    pad = max_len - len(ids)
    ids.extend([tokenizer.pad_id] * pad)
    mask.extend([0] * pad)
    return EncodedSequence(tuple(ids), tuple(mask), max_len, truncated)


def encoded_length(text: str, tokenizer: SubwordTokenizer) -> int:
    """Untruncated sequence length: subwords plus the two special tokens."""
    return len(tokenizer.encode_ids(text)) + 2


def token_length_coverage(
    corpus: Union[Dataset, Iterable[str]],
    tokenizer: SubwordTokenizer,
    max_len: int,
) -> float:
    """Fraction of sentences whose encoded length fits within ``max_len``."""
    texts = [s.text for s in corpus.sentences] \
        if isinstance(corpus, Dataset) else list(corpus)
    if not texts:
        raise DataError("empty corpus")
    fitting = sum(1 for t in texts if encoded_length(t, tokenizer) <= max_len)
    return fitting / len(texts)
