# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled tokenization and phrase-scan kernels.

Semantics must stay identical to the pure-Python versions in
``cira.matching`` (py_token_spans / py_scan_greedy); the equivalence is
enforced by property tests.
"""


def token_spans(str text):
    """Character (start, end) spans of all tokens.

    A token is a maximal run of alphanumeric characters, optionally joined
    by single internal hyphens.
    """
    cdef Py_ssize_t i = 0, n = len(text), start
    cdef Py_UCS4 ch
    cdef list spans = []
    while i < n:
        ch = text[i]
        if ch.isalnum():
            start = i
            i += 1
            while i < n:
                ch = text[i]
                if ch.isalnum():
                    i += 1
                elif ch == u"-" and i + 1 < n and (<Py_UCS4>text[i + 1]).isalnum():
                    i += 2
                    while i < n and (<Py_UCS4>text[i]).isalnum():
                        i += 1
                else:
                    break
            spans.append((start, i))
        else:
            i += 1
    return spans


def scan_greedy(list tokens, dict table, Py_ssize_t max_phrase_len):
    """Greedy leftmost-longest scan over lowercase tokens.

    ``table`` maps first token -> [(phrase tuple, entry index), ...] sorted
    longest first. Returns (entry_index, token_start, token_end) triples.
    """
    cdef Py_ssize_t i = 0, j, n = len(tokens), length
    cdef list hits = []
    cdef tuple phrase, item
    cdef object candidates
    cdef bint matched, ok
    while i < n:
        candidates = table.get(tokens[i])
        if candidates is not None:
            matched = False
            for item in <list>candidates:
                phrase = <tuple>item[0]
                length = len(phrase)
                if i + length > n:
                    continue
                ok = True
                for j in range(length):
                    if tokens[i + j] != phrase[j]:
                        ok = False
                        break
                if ok:
                    hits.append((item[1], i, i + length))
                    i += length
                    matched = True
                    break
            if not matched:
                i += 1
        else:
            i += 1
    return hits
