import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cira.corpus import Dataset, Sentence
from cira.errors import DataError
from cira.lexicon import (AmbiguityStat, CuePhraseEntry, af_table,
                          ambiguity_factor, build_matcher, default_lexicon,
                          expand_pattern, load_lexicon, match_phrases,
                          rule_classify)

from reference_data import AF_REFERENCE

LEXICON = default_lexicon()
BY_PHRASE = {entry.phrase: entry for entry in LEXICON}
MATCHER = build_matcher(LEXICON)


class TestDefaultLexicon:
    def test_contains_if_conjunction(self):
        assert BY_PHRASE["if"].grammatical_type == "conjunction"

    def test_prevent_verb_with_forms(self):
        entry = BY_PHRASE["prevent(s/ed)"]
        assert entry.grammatical_type == "verb"
        assert entry.relation_group == "prevent"
        assert set(entry.surface_forms) == {"prevent", "prevents", "prevented"}

    def test_inventory_size(self):
        # One entry per phrase pattern; patterns expand to more forms.
        assert len(LEXICON) == 84
        assert sum(len(e.surface_forms) for e in LEXICON) >= 140

    def test_covers_all_reference_phrases(self):
        missing = [p for p, *_ in AF_REFERENCE if p not in BY_PHRASE]
        assert missing == []

    def test_relation_groups_only_on_verbs(self):
        for entry in LEXICON:
            assert (entry.relation_group is not None) == \
                (entry.grammatical_type == "verb")

    def test_load_lexicon_round_trip(self, tmp_path):
        path = tmp_path / "lex.csv"
        path.write_text(
            "phrase,grammatical_type,relation_group\n"
            "if,conjunction,\n"
            "cause(s/ed),verb,cause\n"
        )
        entries = load_lexicon(path)
        assert [e.phrase for e in entries] == ["if", "cause(s/ed)"]
        assert entries[1].surface_forms == ("cause", "causes", "caused")


class TestExpandPattern:
    @pytest.mark.parametrize("pattern,expected", [
        ("if", ("if",)),
        ("cause(s/ed)", ("cause", "causes", "caused")),
        ("lead(s) to", ("lead to", "leads to")),
        ("so (that)", ("so", "so that")),
        ("to this/that end", ("to this end", "to that end")),
        ("necessary (to)", ("necessary", "necessary to")),
        ("permit(s/ed)", ("permit", "permits", "permitted")),
        ("enforce(s/ed)", ("enforce", "enforces", "enforced")),
    ])
    def test_expansions(self, pattern, expected):
        assert expand_pattern(pattern) == expected


class TestEntryInvariants:
    def test_relation_group_required_for_verbs(self):
        with pytest.raises(DataError, match="relation_group"):
            CuePhraseEntry(phrase="zap", grammatical_type="verb")

    def test_relation_group_forbidden_otherwise(self):
        with pytest.raises(DataError, match="relation_group"):
            CuePhraseEntry(phrase="zap", grammatical_type="adverb",
                           relation_group="cause")

    def test_unknown_type(self):
        with pytest.raises(DataError, match="grammatical type"):
            CuePhraseEntry(phrase="zap", grammatical_type="interjection")


class TestMatchPhrases:
    def test_example_sentence(self):
        hits = match_phrases("If the process fails, an error message is "
                             "shown.", LEXICON, matcher=MATCHER)
        assert ("if", (0, 2)) in [(e.phrase, span) for e, span in hits]

    def test_no_hit_inside_words(self):
        assert match_phrases("The gift was given.", LEXICON,
                             matcher=MATCHER) == []

    def test_inflected_verb_matches(self):
        hits = match_phrases("overload prevented startup", LEXICON,
                             matcher=MATCHER)
        assert [e.phrase for e, _ in hits] == ["prevent(s/ed)"]


class TestCaseInvariance:
    @given(st.text(alphabet=st.characters(min_codepoint=32,
                                          max_codepoint=126), max_size=80))
    @settings(max_examples=200)
    def test_matching_ignores_input_case(self, text):
        base = [(e.phrase, span) for e, span in
                match_phrases(text, LEXICON, matcher=MATCHER)]
        for variant in (text.upper(), text.lower(), text.swapcase()):
            hits = [(e.phrase, span) for e, span in
                    match_phrases(variant, LEXICON, matcher=MATCHER)]
            assert hits == base


class TestRuleClassify:
    def test_marked_sentence_causal(self):
        assert rule_classify("If the user presses the button, a window "
                             "appears", LEXICON, matcher=MATCHER) == "causal"

    def test_unmarked_sentence_not_causal(self):
        assert rule_classify("The user has no admin rights.", LEXICON,
                             matcher=MATCHER) == "not_causal"

    def test_empty_string(self):
        assert rule_classify("", LEXICON, matcher=MATCHER) == "not_causal"

    @given(st.text(max_size=120))
    @settings(max_examples=200)
    def test_equivalent_to_nonempty_match_set(self, text):
        expected = "causal" if match_phrases(text, LEXICON, matcher=MATCHER) \
            else "not_causal"
        assert rule_classify(text, LEXICON, matcher=MATCHER) == expected


def tiny_corpus(rows):
    """rows: (text, causality-label)"""
    sentences, gold = [], {}
    for i, (text, label) in enumerate(rows):
        sid = f"d#{i}"
        sentences.append(Sentence(id=sid, text=text, doc_id="d",
                                  index_in_doc=i))
        gold[sid] = {"Causality": label}
    return Dataset(sentences=tuple(sentences), gold_labels=gold)


class TestAmbiguityFactor:
    def test_counts_sentences_not_occurrences(self):
        corpus = tiny_corpus([
            ("if x then if y", 1),   # two occurrences, one sentence
            ("if only", 0),
            ("nothing here", 0),
        ])
        stat = ambiguity_factor(BY_PHRASE["if"], corpus)
        assert (stat.causal_count, stat.non_causal_count) == (1, 1)
        assert stat.af == pytest.approx(0.5)

    def test_absent_phrase_flagged_undefined(self):
        corpus = tiny_corpus([("plain words here", 0)])
        stat = ambiguity_factor(BY_PHRASE["whenever"], corpus)
        assert not stat.defined
        assert stat.af is None
        assert not stat.non_ambiguous

    def test_af_requires_full_labels(self):
        corpus = Dataset(sentences=(
            Sentence(id="a", text="if x", doc_id="d", index_in_doc=0),
        ))
        with pytest.raises(DataError, match="gold label"):
            ambiguity_factor(BY_PHRASE["if"], corpus)

    def test_af_bounds_and_monotonicity(self):
        entry = BY_PHRASE["if"]
        previous = -1.0
        for causal in range(0, 8):
            stat = AmbiguityStat(entry, causal, 5)
            assert 0.0 <= stat.af <= 1.0
            assert stat.af >= previous
            previous = stat.af


class TestAfTable:
    def test_reference_counts_reproduce_printed_af(self):
        for phrase, causal, non_causal, printed, flagged in AF_REFERENCE:
            stat = AmbiguityStat(BY_PHRASE[phrase], causal, non_causal)
            # inclusive +/-0.005 band (printed values are 2-decimal roundings)
            assert abs(stat.af - printed) <= 0.005 + 1e-12, phrase
            assert stat.non_ambiguous == flagged, phrase

    def test_table_ordering_and_grouping(self):
        corpus = tiny_corpus([
            ("if x happens y", 1),
            ("when a then b", 1),
            ("the part holds", 0),
        ])
        stats = af_table(corpus, LEXICON)
        types = [s.entry.grammatical_type for s in stats]
        # grouped: all conjunctions before all adverbs, etc.
        assert types == sorted(
            types, key=["conjunction", "adverb", "pronoun", "adjective",
                        "preposition", "verb"].index)
        verbs = [s.entry for s in stats if s.entry.grammatical_type == "verb"]
        groups = [v.relation_group for v in verbs]
        assert groups == sorted(groups, key=["cause", "enable",
                                             "prevent"].index)

    def test_descending_count_within_group(self):
        corpus = tiny_corpus([
            ("when x", 1), ("when y", 1), ("therefore z", 1),
        ])
        stats = af_table(corpus, LEXICON)
        adverbs = [s for s in stats if s.entry.grammatical_type == "adverb"]
        counts = [s.total for s in adverbs]
        assert counts == sorted(counts, reverse=True)

    def test_all_zero_corpus_all_undefined(self):
        corpus = tiny_corpus([("plain words here", 0)])
        stats = af_table(corpus, LEXICON)
        assert all(not s.defined for s in stats)
