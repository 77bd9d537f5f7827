"""Frozen reference statistics from the annotation study behind the
default lexicon.

``AGREEMENT_TABLES`` holds the seven published per-category rater
confusion matrices with their printed percent agreement, Cohen's Kappa,
and Gwet's AC1. ``AF_REFERENCE`` holds, per cue phrase, the printed
causal / non-causal sentence counts, the printed two-decimal ambiguity
factor, and whether the phrase was flagged non-ambiguous (AF >= 0.8 at
print precision). Regression tests recompute everything from the raw
counts and compare against these printed values.
"""

# category: ((n00, n01), (n10, n11)), agreement %, kappa, AC1
AGREEMENT_TABLES = {
    "Causality": (((2034, 193), (274, 499)), 84.4, 0.579, 0.753),
    "Explicit": (((24, 25), (39, 411)), 87.2, 0.358, 0.840),
    "Marked": (((1, 22), (12, 464)), 93.1, 0.023, 0.926),
    "SingleSentence": (((12, 8), (17, 462)), 95.0, 0.464, 0.945),
    "SingleCause": (((41, 77), (43, 338)), 76.0, 0.261, 0.645),
    "SingleEffect": (((63, 72), (46, 318)), 76.4, 0.362, 0.625),
    "EventChain": (((450, 27), (13, 9)), 92.0, 0.270, 0.910),
}

AGREEMENT_AVERAGES = (86.3, 0.331, 0.806)  # agreement %, kappa, AC1

# phrase pattern, causal count, non-causal count, printed AF, non-ambiguous
AF_REFERENCE = [
    # conjunctions
    ("if", 387, 41, 0.90, True),
    ("as", 607, 1313, 0.32, False),
    ("because", 78, 7, 0.92, True),
    ("but", 100, 204, 0.33, False),
    ("in order to", 141, 33, 0.81, True),
    ("so (that)", 88, 86, 0.51, False),
    ("unless", 23, 4, 0.85, True),
    ("while", 71, 90, 0.44, False),
    ("once", 48, 15, 0.76, False),
    ("except", 9, 5, 0.64, False),
    ("as long as", 12, 1, 0.92, True),
    # adverbs
    ("therefore", 61, 6, 0.91, True),
    ("when", 331, 64, 0.84, True),
    ("whenever", 10, 0, 1.00, True),
    ("hence", 21, 9, 0.70, False),
    ("where", 213, 150, 0.59, False),
    ("since", 65, 32, 0.67, False),
    ("consequently", 2, 6, 0.25, False),
    ("wherever", 5, 2, 0.71, False),
    ("rather", 16, 30, 0.35, False),
    ("to this/that end", 12, 0, 1.00, True),
    ("thus", 66, 17, 0.80, True),
    ("for this reason", 7, 3, 0.70, False),
    ("due to", 91, 26, 0.78, False),
    ("thereby", 4, 2, 0.67, False),
    ("as a result", 11, 4, 0.73, False),
    ("for this purpose", 1, 2, 0.33, False),
    # pronouns
    ("which", 277, 608, 0.31, False),
    ("who", 28, 52, 0.35, False),
    ("that", 732, 1178, 0.38, False),
    ("whose", 16, 11, 0.59, False),
    # adjectives
    ("only", 127, 126, 0.50, False),
    ("prior to", 26, 20, 0.57, False),
    ("imperative", 1, 3, 0.25, False),
    ("necessary (to)", 36, 19, 0.65, False),
    # prepositions
    ("for", 1209, 2753, 0.31, False),
    ("during", 327, 137, 0.70, False),
    ("after", 133, 57, 0.70, False),
    ("by", 506, 1171, 0.30, False),
    ("with", 680, 1554, 0.30, False),
    ("in the course of", 2, 1, 0.67, False),
    ("through", 114, 204, 0.36, False),
    ("as part of", 19, 51, 0.27, False),
    ("in this case", 18, 3, 0.86, True),
    ("before", 54, 27, 0.67, False),
    ("until", 33, 11, 0.75, False),
    ("upon", 25, 48, 0.34, False),
    ("in case of", 30, 7, 0.81, True),
    ("in both cases", 1, 0, 1.00, True),
    ("in the event of", 15, 2, 0.88, True),
    ("in response to", 6, 7, 0.46, False),
    ("in the absence of", 8, 1, 0.89, True),
    # verbs, cause group
    ("force(s/ed)", 21, 18, 0.54, False),
    ("cause(s/ed)", 32, 10, 0.76, False),
    ("lead(s) to", 5, 0, 1.00, True),
    ("reduce(s/ed)", 48, 28, 0.63, False),
    ("minimize(s/ed)", 28, 11, 0.72, False),
    ("affect(s/ed)", 13, 19, 0.41, False),
    ("maximize(s/ed)", 11, 5, 0.69, False),
    ("eliminate(s/ed)", 8, 11, 0.42, False),
    ("result(s/ed) in", 50, 43, 0.54, False),
    ("increase(s/ed)", 49, 34, 0.59, False),
    ("decrease(s/ed)", 5, 8, 0.38, False),
    ("impact(s)", 37, 68, 0.35, False),
    ("degrade(s/ed)", 11, 2, 0.85, True),
    ("introduce(s/ed)", 11, 12, 0.48, False),
    ("enforce(s/ed)", 2, 1, 0.67, False),
    ("trigger(s/ed)", 11, 7, 0.61, False),
    # verbs, enable group
    ("depend(s) on", 28, 21, 0.57, False),
    ("require(s/ed)", 316, 262, 0.55, False),
    ("allow(s/ed)", 187, 130, 0.59, False),
    ("need(s/ed)", 98, 162, 0.38, False),
    ("necessitate(s/ed)", 7, 2, 0.78, False),
    ("facilitate(s/ed)", 29, 28, 0.51, False),
    ("enhance(s/ed)", 16, 4, 0.80, True),
    ("ensure(s/ed)", 145, 66, 0.69, False),
    ("achieve(s/ed)", 30, 24, 0.56, False),
    ("support(s/ed)", 128, 301, 0.30, False),
    ("enable(s/ed)", 75, 36, 0.68, False),
    ("permit(s/ed)", 10, 13, 0.43, False),
    ("rely on", 3, 5, 0.38, False),
    # verbs, prevent group
    ("hinder(s/ed)", 1, 1, 0.50, False),
    ("prevent(s/ed)", 38, 17, 0.69, False),
    ("avoid(s/ed)", 14, 23, 0.38, False),
]
