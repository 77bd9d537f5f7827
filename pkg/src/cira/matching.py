"""Word-boundary phrase matching over sentences.

Tokens are maximal runs of alphanumeric characters, optionally joined by
single internal hyphens ("fail-safe" is one token). Matching is
case-insensitive and greedy: at each token position the longest phrase
over the whole table wins, and its tokens are consumed, so "as long as"
never also yields two bare "as" hits.

Tokenization and the greedy scan are the hot loops of corpus analytics
(they run over every sentence for the ambiguity table, the rule baseline,
and every classify request). A compiled kernel is used when the
``cira._matchext`` extension was built; a pure-Python implementation with
identical semantics is selected otherwise, or when CIRA_PURE_PYTHON is
set. ``KERNEL`` names the active implementation.
"""

from __future__ import annotations

import os
import re
from typing import Iterable, Sequence

_TOKEN_RE = re.compile(r"[^\W_]+(?:-[^\W_]+)*", re.UNICODE)


def py_token_spans(text: str) -> list[tuple[int, int]]:
    """Character (start, end) spans of all tokens, pure-Python version."""
    return [m.span() for m in _TOKEN_RE.finditer(text)]


def py_scan_greedy(tokens, table, max_phrase_len):
    """Greedy leftmost-longest scan, pure-Python version.

    ``tokens`` are lowercase token strings; ``table`` maps a first token to
    the (phrase token tuple, entry index) candidates sorted longest first.
    Returns (entry_index, token_start, token_end) triples.
    """
    hits = []
    n = len(tokens)
    i = 0
    while i < n:
        candidates = table.get(tokens[i])
        if candidates is not None:
            for phrase, entry_index in candidates:
                length = len(phrase)
                if i + length <= n and tuple(tokens[i:i + length]) == phrase:
                    hits.append((entry_index, i, i + length))
                    i += length
                    break
            else:
                i += 1
        else:
            i += 1
    return hits


try:  # compiled kernels, if the extension was built
    from . import _matchext
except ImportError:  # pragma: no cover - depends on build environment
    _matchext = None

if _matchext is not None and not os.environ.get("CIRA_PURE_PYTHON"):
    KERNEL = "cython"
    token_spans = _matchext.token_spans
    scan_greedy = _matchext.scan_greedy
else:
    KERNEL = "python"
    token_spans = py_token_spans
    scan_greedy = py_scan_greedy


def tokenize(text: str) -> list[str]:
    """Lowercase word tokens of ``text``."""
    return [text[a:b].lower() for a, b in token_spans(text)]


class PhraseMatcher:
    """Matches a fixed phrase inventory against arbitrary text.

    Built once from (key, surface form strings) pairs; surface forms are
    tokenized with the same tokenizer used on input text, so word
    boundaries always line up.
    """

    def __init__(self, entries: Iterable[tuple[object, Sequence[str]]]):
        self.keys: list[object] = []
        table: dict[str, list[tuple[tuple[str, ...], int]]] = {}
        max_len = 1
        for key, surface_forms in entries:
            entry_index = len(self.keys)
            self.keys.append(key)
            for form in surface_forms:
                phrase = tuple(tokenize(form))
                if not phrase:
                    continue
                table.setdefault(phrase[0], []).append((phrase, entry_index))
                max_len = max(max_len, len(phrase))
        for candidates in table.values():
            candidates.sort(key=lambda item: len(item[0]), reverse=True)
        self._table = table
        self._max_phrase_len = max_len

    def match(self, text: str) -> list[tuple[object, tuple[int, int]]]:
        """All phrase hits as (key, (char_start, char_end)) pairs."""
        spans = token_spans(text)
        tokens = [text[a:b].lower() for a, b in spans]
        hits = scan_greedy(tokens, self._table, self._max_phrase_len)
        return [
            (self.keys[entry_index], (spans[a][0], spans[b - 1][1]))
            for entry_index, a, b in hits
        ]

    def contains_any(self, text: str) -> bool:
        """True if at least one phrase occurs in ``text``."""
        return bool(self.match(text))

    def present_keys(self, text: str) -> set:
        """The distinct entry keys occurring in ``text``."""
        return {key for key, _ in self.match(text)}
