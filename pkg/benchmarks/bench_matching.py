"""Benchmark the compiled matching kernels against the pure-Python
fallback.

The tokenizer and greedy phrase scan run over every sentence for the
ambiguity table, the rule baseline, and each classify request, so they
are the hot loops of corpus analytics. Usage:

    python benchmarks/bench_matching.py [sentence_count]
"""

import importlib
import os
import random
import statistics
import sys
import time

SENTENCES = int(sys.argv[1]) if len(sys.argv) > 1 else 15_000
REPEATS = 5

WORDS = ("if the process fails an error message is shown unless the valve "
         "closes because pressure increased beyond the fail-safe limit and "
         "the operator panel displays a grey warning triangle during "
         "startup as long as the pump keeps running").split()


def make_texts(count: int) -> list[str]:
    rng = random.Random(1234)
    return [
        " ".join(rng.choice(WORDS) for _ in range(rng.randint(8, 28)))
        for _ in range(count)
    ]


def bench(fn, *args) -> float:
    timings = []
    for _ in range(REPEATS):
        started = time.perf_counter()
        fn(*args)
        timings.append(time.perf_counter() - started)
    return statistics.median(timings)


def run(kernel: str, texts: list[str]) -> dict[str, float]:
    os.environ.pop("CIRA_PURE_PYTHON", None)
    if kernel == "python":
        os.environ["CIRA_PURE_PYTHON"] = "1"
    import cira.matching
    importlib.reload(cira.matching)
    import cira.lexicon
    importlib.reload(cira.lexicon)
    assert cira.matching.KERNEL == kernel, (
        f"kernel {kernel!r} unavailable (got {cira.matching.KERNEL!r}); "
        "build the extension first")

    tokenize_time = bench(
        lambda: [cira.matching.token_spans(t) for t in texts])
    matcher = cira.lexicon.build_matcher(cira.lexicon.default_lexicon())
    match_time = bench(lambda: [matcher.match(t) for t in texts])
    return {"tokenize": tokenize_time, "match": match_time}


def main():
    texts = make_texts(SENTENCES)
    results = {kernel: run(kernel, texts) for kernel in ("cython", "python")}
    os.environ.pop("CIRA_PURE_PYTHON", None)

    print(f"\n{SENTENCES} sentences, median of {REPEATS} runs")
    print(f"{'stage':<10} {'cython':>10} {'python':>10} {'speedup':>9}")
    for stage in ("tokenize", "match"):
        compiled = results["cython"][stage]
        pure = results["python"][stage]
        print(f"{stage:<10} {compiled * 1000:>8.1f}ms {pure * 1000:>8.1f}ms "
              f"{pure / compiled:>8.2f}x")


if __name__ == "__main__":
    main()
