"""Causality detection workbench for natural-language requirements.

Subpackages cover the corpus data model, the cue-phrase lexicon and rule
baseline, inter-annotator agreement statistics, feature extraction,
shallow and transformer classifiers, the evaluation harness, and the
annotation HTTP service. The ``cira`` CLI ties them together.
"""

__version__ = "0.1.0"

from .corpus import (AnnotationRecord, CategorySchema, Dataset, Sentence,
                     load_corpus, save_corpus, split, undersample)
from .lexicon import (AmbiguityStat, CuePhraseEntry, af_table,
                      ambiguity_factor, default_lexicon, match_phrases,
                      rule_classify)
from .agreement import (ContingencyTable, agreement_report, cohens_kappa,
                        gwets_ac1, percent_agreement)
from .evaluation import compute_metrics, cross_validate, compare

__all__ = [
    "__version__",
    "AnnotationRecord", "CategorySchema", "Dataset", "Sentence",
    "load_corpus", "save_corpus", "split", "undersample",
    "AmbiguityStat", "CuePhraseEntry", "af_table", "ambiguity_factor",
    "default_lexicon", "match_phrases", "rule_classify",
    "ContingencyTable", "agreement_report", "cohens_kappa", "gwets_ac1",
    "percent_agreement",
    "compute_metrics", "cross_validate", "compare",
]
