"""The seven classical binary classifiers and exhaustive grid search.

This module owns the model specs, grid schemas, seeds, and determinism
contracts; the numerics come from scikit-learn. Grid axes accept the
historically common aliases ``max_features="auto"`` (now "sqrt") and
AdaBoost ``algorithm="SAMME.R"`` (the boosting variant scikit-learn
retired); they are normalized before fitting so older grid files keep
working.

Grid combinations are enumerated in a canonical order: axes sorted by
name, values in their listed order, embedding choice included as a grid
axis. Ties on the selection score resolve to the first combination in
that order.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping, Optional, Sequence

import numpy as np
from joblib import Parallel, delayed
from scipy import sparse
from sklearn.ensemble import AdaBoostClassifier, RandomForestClassifier
from sklearn.linear_model import LogisticRegression
from sklearn.naive_bayes import MultinomialNB
from sklearn.neighbors import KNeighborsClassifier
from sklearn.svm import SVC
from sklearn.tree import DecisionTreeClassifier

from .corpus import Dataset
from .errors import DataError
from .features import Vocabulary, fit_vocabulary, transform

ALGORITHMS = (
    "naive_bayes", "svm", "random_forest", "decision_tree",
    "logistic_regression", "ada_boost", "k_nearest_neighbor",
)
EMBEDDINGS = ("bow", "tfidf")
SCORING = ("accuracy", "macro_f1")

#: Hyperparameter names accepted per algorithm (the published grid schema).
GRID_SCHEMAS: dict[str, tuple[str, ...]] = {
    "naive_bayes": ("alpha", "fit_prior"),
    "svm": ("C", "gamma", "kernel"),
    "random_forest": ("n_estimators", "criterion", "max_features"),
    "decision_tree": ("criterion", "splitter", "max_features"),
    "logistic_regression": ("C", "solver"),
    "ada_boost": ("n_estimators", "learning_rate", "algorithm"),
    "k_nearest_neighbor": ("n_neighbors", "weights", "algorithm"),
}

#: Default search grids. Every axis carries the established best values
#: for this task plus alternatives, so known-good combinations are always
#: expressible.
DEFAULT_GRIDS: dict[str, dict[str, list]] = {
    "naive_bayes": {
        "alpha": [0.1, 0.5, 1.0],
        "fit_prior": [True, False],
        "embedding": ["bow", "tfidf"],
    },
    "svm": {
        "C": [1, 10, 50],
        "gamma": [0.001, 0.01, "scale"],
        "kernel": ["rbf", "linear"],
        "embedding": ["bow", "tfidf"],
    },
    "random_forest": {
        "n_estimators": [100, 300, 500],
        "criterion": ["gini", "entropy"],
        "max_features": ["auto", "log2", None],
        "embedding": ["bow", "tfidf"],
    },
    "decision_tree": {
        "criterion": ["gini", "entropy"],
        "splitter": ["best", "random"],
        "max_features": ["auto", "log2", None],
        "embedding": ["bow", "tfidf"],
    },
    "logistic_regression": {
        "C": [0.1, 1, 10],
        "solver": ["liblinear", "lbfgs"],
        "embedding": ["bow", "tfidf"],
    },
    "ada_boost": {
        "n_estimators": [50, 200, 500],
        "learning_rate": [0.5, 1.0],
        "algorithm": ["SAMME.R"],
        "embedding": ["bow", "tfidf"],
    },
    "k_nearest_neighbor": {
        "n_neighbors": [5, 10, 20],
        "weights": ["uniform", "distance"],
        "algorithm": ["ball_tree", "brute"],
        "embedding": ["bow", "tfidf"],
    },
}


@dataclass(frozen=True)
class ShallowModelSpec:
    algorithm: str
    embedding: str
    hyperparameters: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise DataError(
                f"unknown algorithm {self.algorithm!r}; "
                f"valid: {', '.join(ALGORITHMS)}"
            )
        if self.embedding not in EMBEDDINGS:
            raise DataError(
                f"unknown embedding {self.embedding!r}; valid: bow, tfidf"
            )
        allowed = GRID_SCHEMAS[self.algorithm]
        unknown = sorted(set(self.hyperparameters) - set(allowed))
        if unknown:
            raise DataError(
                f"{self.algorithm}: unknown hyperparameters {unknown}; "
                f"schema allows {sorted(allowed)}"
            )


def _normalize(algorithm: str, params: Mapping[str, Any]) -> dict[str, Any]:
    out = dict(params)
    if out.get("max_features") == "auto":
        out["max_features"] = "sqrt"
    if algorithm == "ada_boost":
        # scikit-learn retired the SAMME.R/SAMME switch; both spellings now
        # denote the only supported boosting variant.
        out.pop("algorithm", None)
    return out


def build_estimator(spec: ShallowModelSpec, seed: int):
    params = _normalize(spec.algorithm, spec.hyperparameters)
    if spec.algorithm == "naive_bayes":
        return MultinomialNB(**params)
    if spec.algorithm == "svm":
        return SVC(random_state=seed, **params)
    if spec.algorithm == "random_forest":
        return RandomForestClassifier(random_state=seed, **params)
    if spec.algorithm == "decision_tree":
        return DecisionTreeClassifier(random_state=seed, **params)
    if spec.algorithm == "logistic_regression":
        return LogisticRegression(random_state=seed, max_iter=1000, **params)
    if spec.algorithm == "ada_boost":
        return AdaBoostClassifier(random_state=seed, **params)
    if spec.algorithm == "k_nearest_neighbor":
        return KNeighborsClassifier(**params)
    raise DataError(f"unknown algorithm {spec.algorithm!r}")


@dataclass
class TrainedShallowModel:
    spec: ShallowModelSpec
    estimator: Any
    vocabulary: Optional[Vocabulary] = None

    @property
    def n_features(self) -> int:
        return int(self.estimator.n_features_in_)


def train(
    spec: ShallowModelSpec,
    features: sparse.spmatrix,
    labels: Sequence[int],
    seed: int,
    vocabulary: Optional[Vocabulary] = None,
) -> TrainedShallowModel:
    """Fit one classifier on prevectorized features.

    Deterministic for a fixed seed. Single-class training data is
    rejected.
    """
    labels = np.asarray(labels)
    if features.shape[0] != len(labels):
        raise DataError(
            f"{features.shape[0]} feature rows but {len(labels)} labels"
        )
    if features.shape[0] < 2 or len(np.unique(labels)) < 2:
        raise DataError("training data must contain both classes")
    estimator = build_estimator(spec, seed)
    estimator.fit(features, labels)
    return TrainedShallowModel(spec=spec, estimator=estimator,
                               vocabulary=vocabulary)


def predict(model: TrainedShallowModel, features: sparse.spmatrix) -> list[int]:
    if features.shape[0] == 0:
        return []
    if features.shape[1] != model.n_features:
        raise DataError(
            f"feature dimension {features.shape[1]} does not match the "
            f"model's {model.n_features}"
        )
    return [int(y) for y in model.estimator.predict(features)]


def train_on_texts(
    spec: ShallowModelSpec, texts: Sequence[str], labels: Sequence[int],
    seed: int
) -> TrainedShallowModel:
    """Fit a vocabulary on ``texts`` and train on the derived features."""
    vocabulary = fit_vocabulary(texts)
    features = transform(texts, vocabulary, spec.embedding)
    return train(spec, features, labels, seed, vocabulary=vocabulary)


def predict_texts(model: TrainedShallowModel, texts: Sequence[str]) -> list[int]:
    if model.vocabulary is None:
        raise DataError("model was trained without a vocabulary reference")
    return predict(model, transform(texts, model.vocabulary,
                                    model.spec.embedding))


# ---------------------------------------------------------------------------
# Grid search

@dataclass(frozen=True)
class GridCell:
    combination: Mapping[str, Any]
    fold_scores: tuple[float, ...]

    @property
    def mean_score(self) -> float:
        return sum(self.fold_scores) / len(self.fold_scores)


@dataclass(frozen=True)
class GridSearchResult:
    algorithm: str
    best: Mapping[str, Any]
    cells: tuple[GridCell, ...]
    scoring: str


def enumerate_combinations(grid: Mapping[str, Sequence]) -> list[dict]:
    """Cartesian product of the grid in canonical order (axes sorted by
    name, values in listed order)."""
    if not grid:
        raise DataError("empty grid")
    axes = sorted(grid)
    for axis in axes:
        values = list(grid[axis])
        if not values:
            raise DataError(f"grid axis {axis!r} has no values")
    return [
        dict(zip(axes, values))
        for values in itertools.product(*[list(grid[a]) for a in axes])
    ]


def _score(predictions: Sequence[int], gold: Sequence[int], scoring: str) -> float:
    predictions = np.asarray(predictions)
    gold = np.asarray(gold)
    if scoring == "accuracy":
        return float((predictions == gold).mean())
    if scoring == "macro_f1":
        f1s = []
        for positive in (1, 0):
            tp = int(((predictions == positive) & (gold == positive)).sum())
            fp = int(((predictions == positive) & (gold != positive)).sum())
            fn = int(((predictions != positive) & (gold == positive)).sum())
            p = tp / (tp + fp) if tp + fp else 0.0
            r = tp / (tp + fn) if tp + fn else 0.0
            f1s.append(2 * p * r / (p + r) if p + r else 0.0)
        return float(np.mean(f1s))
    raise DataError(f"unknown scoring {scoring!r}; valid: {', '.join(SCORING)}")


def _vectorize_folds(
    folds: Sequence[tuple[Dataset, Dataset]], embeddings: Sequence[str]
) -> list[dict]:
    """Per fold: labels plus train/validation feature matrices per
    embedding. The vocabulary is fitted on the fold's training texts only
    and shared by every grid combination."""
    out = []
    for train_ds, val_ds in folds:
        train_texts, train_labels = train_ds.texts_and_labels()
        val_texts, val_labels = val_ds.texts_and_labels()
        vocabulary = fit_vocabulary(train_texts)
        out.append({
            "train_labels": train_labels,
            "val_labels": val_labels,
            "features": {
                embedding: (
                    transform(train_texts, vocabulary, embedding),
                    transform(val_texts, vocabulary, embedding),
                )
                for embedding in embeddings
            },
        })
    return out


def _evaluate_combination(
    algorithm: str,
    combination: Mapping[str, Any],
    fold_data: Sequence[dict],
    scoring: str,
    seed: int,
) -> GridCell:
    params = {k: v for k, v in combination.items() if k != "embedding"}
    spec = ShallowModelSpec(algorithm=algorithm,
                            embedding=combination["embedding"],
                            hyperparameters=params)
    scores = []
    for fold in fold_data:
        train_features, val_features = fold["features"][spec.embedding]
        model = train(spec, train_features, fold["train_labels"], seed)
        predictions = predict(model, val_features)
        scores.append(_score(predictions, fold["val_labels"], scoring))
    return GridCell(combination=dict(combination), fold_scores=tuple(scores))


def grid_search(
    algorithm: str,
    grid: Optional[Mapping[str, Sequence]],
    folds: Sequence[tuple[Dataset, Dataset]],
    scoring: str = "accuracy",
    seed: int = 0,
    n_jobs: int = 1,
) -> GridSearchResult:
    """Score every hyperparameter combination on every fold.

    Returns the argmax by mean validation score; ties break to the first
    combination in canonical order. Combinations are independent, so they
    may be evaluated in parallel (``n_jobs``); results merge in canonical
    order either way.
    """
    if algorithm not in ALGORITHMS:
        raise DataError(
            f"unknown algorithm {algorithm!r}; valid: {', '.join(ALGORITHMS)}"
        )
    if grid is None:
        grid = DEFAULT_GRIDS[algorithm]
    if "embedding" not in grid:
        grid = {**grid, "embedding": list(EMBEDDINGS)}
    unknown = sorted(set(grid) - set(GRID_SCHEMAS[algorithm]) - {"embedding"})
    if unknown:
        raise DataError(
            f"{algorithm}: unknown grid axes {unknown}; "
            f"schema allows {sorted(GRID_SCHEMAS[algorithm])}"
        )
    combinations = enumerate_combinations(grid)
    if not folds:
        raise DataError("grid search needs at least one fold")
    embeddings = [e for e in EMBEDDINGS if e in set(grid["embedding"])]
    if not embeddings:
        raise DataError("embedding axis must contain bow and/or tfidf")
    fold_data = _vectorize_folds(folds, embeddings)

    if n_jobs == 1:
        cells = [
            _evaluate_combination(algorithm, combo, fold_data, scoring, seed)
            for combo in combinations
        ]
    else:
        cells = Parallel(n_jobs=n_jobs, prefer="threads")(
            delayed(_evaluate_combination)(
                algorithm, combo, fold_data, scoring, seed)
            for combo in combinations
        )
    best = max(range(len(cells)), key=lambda i: (cells[i].mean_score, -i))
    return GridSearchResult(
        algorithm=algorithm, best=dict(combinations[best]),
        cells=tuple(cells), scoring=scoring,
    )


def load_grid_file(path: str | Path) -> dict[str, dict[str, list]]:
    """Grid definition file: {algorithm: {axis: [values, ...]}}."""
    with Path(path).open("r", encoding="utf-8") as fh:
        raw = json.load(fh)
    if not isinstance(raw, dict):
        raise DataError("grid file must be a JSON object")
    return raw


def grid_results_csv(result: GridSearchResult) -> str:
    import csv
    import io
    out = io.StringIO()
    writer = csv.writer(out)
    k = len(result.cells[0].fold_scores) if result.cells else 0
    writer.writerow(["combination", *[f"fold_{i}" for i in range(k)], "mean"])
    for cell in result.cells:
        writer.writerow([
            json.dumps(cell.combination, sort_keys=True, default=str),
            *[f"{s:.6f}" for s in cell.fold_scores],
            f"{cell.mean_score:.6f}",
        ])
    return out.getvalue()
