"""Classifier systems wired into the evaluation harness contract.

Each system owns its selection procedure: the rule baseline has nothing
to select, shallow systems grid-search over the validation folds and then
refit on all non-test data, and the transformer fine-tunes on the first
fold's partition using its validation half for epoch selection.
"""

from __future__ import annotations

from typing import Any, Mapping, Optional, Sequence

from .corpus import Dataset
from .errors import DataError
from .features import SubwordTokenizer, Tagger
from .lexicon import (CuePhraseEntry, LABEL_CAUSAL, LABEL_NOT_CAUSAL,
                      build_matcher, default_lexicon)
from .shallow import (DEFAULT_GRIDS, ShallowModelSpec, TrainedShallowModel,
                      grid_search, train_on_texts, predict_texts)
from .transformer import CausalityModel, VariantConfig, fine_tune


class RuleBaselineSystem:
    """Causal iff any lexicon phrase occurs in the sentence."""

    family = "rule"

    def __init__(self, lexicon: Optional[Sequence[CuePhraseEntry]] = None,
                 min_af: Optional[float] = None,
                 af_by_phrase: Optional[Mapping[str, float]] = None):
        self.system_id = "rule"
        entries = tuple(lexicon if lexicon is not None else default_lexicon())
        if min_af is not None:
            if af_by_phrase is None:
                raise DataError(
                    "min_af filtering needs per-phrase ambiguity factors"
                )
            entries = tuple(
                e for e in entries
                if af_by_phrase.get(e.phrase, 0.0) >= min_af
            )
        self._matcher = build_matcher(entries)

    @property
    def best_hyperparameters(self) -> dict[str, Any]:
        return {}

    def fit(self, folds, seed: int) -> None:  # nothing to fit
        return None

    def predict(self, texts: Sequence[str]) -> list[int]:
        return [1 if self._matcher.contains_any(t) else 0 for t in texts]

    def classify(self, text: str) -> str:
        return LABEL_CAUSAL if self._matcher.contains_any(text) \
            else LABEL_NOT_CAUSAL


class ConstantSystem:
    """Predicts one label for everything; a degenerate reference point."""

    family = "dummy"

    def __init__(self, label: int):
        if label not in (0, 1):
            raise DataError("constant label must be 0 or 1")
        self.label = label
        self.system_id = f"dummy_{'causal' if label else 'not_causal'}"

    @property
    def best_hyperparameters(self) -> dict[str, Any]:
        return {"label": self.label}

    def fit(self, folds, seed: int) -> None:
        return None

    def predict(self, texts: Sequence[str]) -> list[int]:
        return [self.label] * len(texts)


class ShallowSystem:
    """One classical algorithm, tuned by exhaustive grid search."""

    family = "shallow"

    def __init__(self, algorithm: str,
                 grid: Optional[Mapping[str, Sequence]] = None,
                 scoring: str = "accuracy", n_jobs: int = 1):
        if algorithm not in DEFAULT_GRIDS:
            raise DataError(
                f"unknown algorithm {algorithm!r}; "
                f"valid: {', '.join(sorted(DEFAULT_GRIDS))}"
            )
        self.system_id = algorithm
        self.algorithm = algorithm
        self.grid = grid
        self.scoring = scoring
        self.n_jobs = n_jobs
        self.grid_result = None
        self._model: Optional[TrainedShallowModel] = None
        self._best: dict[str, Any] = {}

    @property
    def best_hyperparameters(self) -> dict[str, Any]:
        return dict(self._best)

    def fit(self, folds: Sequence[tuple[Dataset, Dataset]], seed: int) -> None:
        result = grid_search(self.algorithm, self.grid, folds,
                             scoring=self.scoring, seed=seed,
                             n_jobs=self.n_jobs)
        self.grid_result = result
        self._best = dict(result.best)
        # Refit the winner on the full non-test data (any fold's
        # train+validation united covers it).
        train_ds, val_ds = folds[0]
        texts, labels = train_ds.texts_and_labels()
        val_texts, val_labels = val_ds.texts_and_labels()
        texts += val_texts
        labels += val_labels
        spec = ShallowModelSpec(
            algorithm=self.algorithm,
            embedding=result.best["embedding"],
            hyperparameters={k: v for k, v in result.best.items()
                             if k != "embedding"},
        )
        self._model = train_on_texts(spec, texts, labels, seed)

    def predict(self, texts: Sequence[str]) -> list[int]:
        if self._model is None:
            raise DataError(f"{self.system_id}: fit before predict")
        return predict_texts(self._model, texts)


class TransformerSystem:
    """One fine-tuning variant (base / pos / dep)."""

    family = "transformer"

    def __init__(self, config: VariantConfig,
                 tagger: Optional[Tagger] = None,
                 tokenizer: Optional[SubwordTokenizer] = None):
        self.system_id = f"transformer_{config.variant}"
        self.config = config
        self.tagger = tagger
        self.tokenizer = tokenizer
        self.model: Optional[CausalityModel] = None

    @property
    def best_hyperparameters(self) -> dict[str, Any]:
        return self.config.hyperparameters()

    def fit(self, folds: Sequence[tuple[Dataset, Dataset]], seed: int) -> None:
        train_ds, val_ds = folds[0]
        self.model = fine_tune(self.config, train_ds, val_ds, seed,
                               tagger=self.tagger, tokenizer=self.tokenizer)

    def predict(self, texts: Sequence[str]) -> list[int]:
        if self.model is None:
            raise DataError(f"{self.system_id}: fit before predict")
        return self.model.predict_labels(texts)


def make_system(
    name: str,
    tagger: Optional[Tagger] = None,
    grid: Optional[Mapping[str, Mapping[str, Sequence]]] = None,
    encoder_checkpoint: Optional[str] = None,
    epochs: Optional[int] = None,
):
    """Build a system from its CLI spelling.

    Valid names: rule, dummy_causal, dummy_not_causal, the seven shallow
    algorithm names, and transformer:base|pos|dep.
    """
    shallow_names = sorted(DEFAULT_GRIDS)
    valid = ["rule", "dummy_causal", "dummy_not_causal", *shallow_names,
             "transformer:base", "transformer:pos", "transformer:dep"]
    if name == "rule":
        return RuleBaselineSystem()
    if name == "dummy_causal":
        return ConstantSystem(1)
    if name == "dummy_not_causal":
        return ConstantSystem(0)
    if name in DEFAULT_GRIDS:
        return ShallowSystem(name, grid=(grid or {}).get(name))
    if name.startswith("transformer:"):
        variant = name.split(":", 1)[1]
        overrides = {}
        if encoder_checkpoint:
            overrides["encoder_checkpoint"] = encoder_checkpoint
        if epochs is not None:
            overrides["epochs"] = epochs
        config = VariantConfig(variant=variant, **overrides)
        return TransformerSystem(config, tagger=tagger)
    raise DataError(
        f"unknown system {name!r}; valid names: {', '.join(valid)}"
    )
