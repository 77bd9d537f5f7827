"""Causal cue-phrase lexicon, ambiguity factors, and the rule baseline.

The default lexicon ships as ``data/cue_phrases.csv``. Phrases are stored
in a compact pattern notation and expanded to surface forms at load time:

* ``cause(s/ed)``   -> cause, causes, caused (inflection suffixes)
* ``lead(s) to``    -> lead to, leads to
* ``so (that)``     -> so, so that (optional word)
* ``to this/that end`` -> to this end, to that end (word alternatives)

The ambiguity factor of a phrase is the share of sentences containing it
that are causal; phrases at or above 0.80 (at the two-decimal precision
used in reports) are flagged non-ambiguous.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Iterable, Optional, Sequence

from .corpus import Dataset
from .errors import DataError
from .matching import PhraseMatcher

GRAMMATICAL_TYPES = (
    "conjunction", "adverb", "pronoun", "adjective", "preposition", "verb"
)
RELATION_GROUPS = ("cause", "enable", "prevent")

LABEL_CAUSAL = "causal"
LABEL_NOT_CAUSAL = "not_causal"

#: Ratio at or above which a phrase counts as non-ambiguous.
NON_AMBIGUOUS_THRESHOLD = 0.8

# "-ed" attachment is plain concatenation except for stems already ending
# in "e" (handled generically) and the doubled-consonant cases below.
_ED_EXCEPTIONS = {"permit": "permitted"}


def _inflect_ed(stem: str) -> str:
    if stem in _ED_EXCEPTIONS:
        return _ED_EXCEPTIONS[stem]
    if stem.endswith("e"):
        return stem + "d"
    return stem + "ed"


def expand_pattern(pattern: str) -> tuple[str, ...]:
    """All surface forms denoted by a phrase pattern."""
    alternatives_per_word: list[list[str]] = []
    for word in pattern.split():
        if word.endswith("(s/ed)"):
            stem = word[: -len("(s/ed)")]
            alternatives_per_word.append([stem, stem + "s", _inflect_ed(stem)])
        elif word.endswith("(s)"):
            stem = word[: -len("(s)")]
            alternatives_per_word.append([stem, stem + "s"])
        elif word.startswith("(") and word.endswith(")"):
            alternatives_per_word.append(["", word[1:-1]])
        elif "/" in word:
            alternatives_per_word.append(word.split("/"))
        else:
            alternatives_per_word.append([word])

    forms = [""]
    for alternatives in alternatives_per_word:
        forms = [
            (prefix + " " + alt).strip() if alt else prefix
            for prefix in forms
            for alt in alternatives
        ]
    out = tuple(dict.fromkeys(f for f in forms if f))
    if not out:
        raise DataError(f"pattern {pattern!r} expands to nothing")
    return out


@dataclass(frozen=True)
class CuePhraseEntry:
    phrase: str
    grammatical_type: str
    relation_group: Optional[str] = None
    surface_forms: tuple[str, ...] = ()

    def __post_init__(self):
        if not self.phrase:
            raise DataError("empty cue phrase")
        if self.grammatical_type not in GRAMMATICAL_TYPES:
            raise DataError(
                f"unknown grammatical type {self.grammatical_type!r} "
                f"for phrase {self.phrase!r}"
            )
        if (self.relation_group is not None) != (self.grammatical_type == "verb"):
            raise DataError(
                f"phrase {self.phrase!r}: relation_group is set exactly for verbs"
            )
        if self.relation_group is not None and \
                self.relation_group not in RELATION_GROUPS:
            raise DataError(
                f"unknown relation group {self.relation_group!r} "
                f"for phrase {self.phrase!r}"
            )
        if not self.surface_forms:
            object.__setattr__(self, "surface_forms", expand_pattern(self.phrase))


def _entries_from_rows(rows: Iterable[dict]) -> tuple[CuePhraseEntry, ...]:
    entries = []
    for row in rows:
        entries.append(CuePhraseEntry(
            phrase=row["phrase"].strip().lower(),
            grammatical_type=row["grammatical_type"].strip(),
            relation_group=(row.get("relation_group") or "").strip() or None,
        ))
    return tuple(entries)


def load_lexicon(path: str | Path) -> tuple[CuePhraseEntry, ...]:
    """Load a lexicon CSV (columns phrase, grammatical_type, relation_group)."""
    with Path(path).open("r", encoding="utf-8", newline="") as fh:
        return _entries_from_rows(csv.DictReader(fh))


def default_lexicon() -> tuple[CuePhraseEntry, ...]:
    """The built-in cue-phrase inventory."""
    data = resources.files("cira").joinpath("data/cue_phrases.csv")
    with data.open("r", encoding="utf-8") as fh:
        return _entries_from_rows(csv.DictReader(fh))


def build_matcher(lexicon: Sequence[CuePhraseEntry]) -> PhraseMatcher:
    return PhraseMatcher((entry, entry.surface_forms) for entry in lexicon)


def match_phrases(
    text: str,
    lexicon: Sequence[CuePhraseEntry],
    matcher: Optional[PhraseMatcher] = None,
) -> list[tuple[CuePhraseEntry, tuple[int, int]]]:
    """Lexicon hits in ``text`` with their character spans.

    Pass a prebuilt ``matcher`` when calling in a loop; building one per
    call compiles the whole lexicon each time.
    """
    if matcher is None:
        matcher = build_matcher(lexicon)
    return matcher.match(text)


def rule_classify(
    text: str,
    lexicon: Sequence[CuePhraseEntry],
    matcher: Optional[PhraseMatcher] = None,
) -> str:
    """"causal" iff at least one lexicon phrase occurs in the text."""
    if matcher is None:
        matcher = build_matcher(lexicon)
    return LABEL_CAUSAL if matcher.contains_any(text) else LABEL_NOT_CAUSAL


@dataclass(frozen=True)
class AmbiguityStat:
    entry: CuePhraseEntry
    causal_count: int
    non_causal_count: int

    @property
    def total(self) -> int:
        return self.causal_count + self.non_causal_count

    @property
    def defined(self) -> bool:
        return self.total > 0

    @property
    def af(self) -> Optional[float]:
        """Share of sentences containing the phrase that are causal;
        None when the phrase never occurs."""
        if not self.defined:
            return None
        return self.causal_count / self.total

    @property
    def non_ambiguous(self) -> bool:
        """AF at or above the 0.8 threshold, judged at the two-decimal
        precision reports use (so a ratio printed as 0.80 is flagged)."""
        return self.defined and round(self.af, 2) >= NON_AMBIGUOUS_THRESHOLD


def _count_presences(
    dataset: Dataset, matcher: PhraseMatcher
) -> dict[CuePhraseEntry, list[int]]:
    """Per entry: [causal, non-causal] sentence counts (presence, not
    occurrences)."""
    counts: dict[CuePhraseEntry, list[int]] = {}
    unlabeled = 0
    for sentence in dataset.sentences:
        label = dataset.causality_of(sentence.id)
        if label is None:
            unlabeled += 1
            continue
        for entry in matcher.present_keys(sentence.text):
            slot = counts.setdefault(entry, [0, 0])
            slot[0 if label == 1 else 1] += 1
    if unlabeled:
        raise DataError(
            f"{unlabeled} sentences lack a Causality gold label; "
            "ambiguity factors need fully labeled data"
        )
    return counts


def ambiguity_factor(entry: CuePhraseEntry, dataset: Dataset) -> AmbiguityStat:
    """Causal/non-causal presence counts and AF for a single phrase."""
    matcher = PhraseMatcher([(entry, entry.surface_forms)])
    counts = _count_presences(dataset, matcher).get(entry, [0, 0])
    return AmbiguityStat(entry, counts[0], counts[1])


def af_table(
    dataset: Dataset, lexicon: Sequence[CuePhraseEntry]
) -> list[AmbiguityStat]:
    """Ambiguity statistics for the whole lexicon.

    Ordered by grammatical type (verbs additionally by relation group),
    then by descending total count; ties alphabetically.
    """
    matcher = build_matcher(lexicon)
    counts = _count_presences(dataset, matcher)
    stats = [
        AmbiguityStat(entry, *counts.get(entry, [0, 0])) for entry in lexicon
    ]

    type_rank = {name: i for i, name in enumerate(GRAMMATICAL_TYPES)}
    group_rank = {name: i for i, name in enumerate(RELATION_GROUPS)}

    def sort_key(stat: AmbiguityStat):
        entry = stat.entry
        return (
            type_rank[entry.grammatical_type],
            group_rank.get(entry.relation_group, -1),
            -stat.total,
            entry.phrase,
        )

    return sorted(stats, key=sort_key)
