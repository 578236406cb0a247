"""Four from-scratch classifiers behind one training/prediction contract.

KNN and SVM operate in normalized feature space; `train` refuses a
dataset that has not been through `dataset.normalize` for those kinds.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import asdict, dataclass, replace

import numpy as np

from ..dataset import Dataset, InsufficientData
from ..metrics import accuracy
from .base import (
    CLASSES,
    BaseModel,
    EmptyTrainingSet,
    FeatureMismatch,
    GradientBoostParams,
    Hyperparams,
    KnnParams,
    KTooLarge,
    ModelKind,
    NonFiniteFeature,
    PARAMS_FOR_KIND,
    RandomForestParams,
    SvmParams,
    VersionMismatch,
    softmax,
)
from .boosting import GradientBoostModel, ce_grad_hess, ce_loss
from .forest import RandomForestModel
from .knn import KnnModel
from .svm import LinearSvmModel

__all__ = [
    "CLASSES",
    "BaseModel",
    "EmptyTrainingSet",
    "FeatureMismatch",
    "GradientBoostModel",
    "GradientBoostParams",
    "Hyperparams",
    "KnnModel",
    "KnnParams",
    "KTooLarge",
    "LinearSvmModel",
    "ModelKind",
    "NonFiniteFeature",
    "RandomForestModel",
    "RandomForestParams",
    "SvmParams",
    "VersionMismatch",
    "ce_grad_hess",
    "ce_loss",
    "softmax",
    "train",
    "grid_search",
    "Exhaustive",
    "Randomized",
    "model_to_dict",
    "model_from_dict",
    "save_model",
    "load_model",
    "default_params",
    "DEFAULT_GRIDS",
]

MODEL_FOR_KIND = {
    ModelKind.RANDOM_FOREST: RandomForestModel,
    ModelKind.KNN: KnnModel,
    ModelKind.SVM: LinearSvmModel,
    ModelKind.GRADIENT_BOOST: GradientBoostModel,
}

NORMALIZED_KINDS = (ModelKind.KNN, ModelKind.SVM)

MODEL_FORMAT_VERSION = 1

# shipped presets for hyperparameter search; the paper publishes none
DEFAULT_GRIDS: dict[ModelKind, dict[str, list]] = {
    ModelKind.RANDOM_FOREST: {
        "n_trees": [100, 300, 500],
        "max_depth": [6, 10, 14],
        "min_samples_leaf": [1, 3],
    },
    ModelKind.KNN: {"k": [5, 11, 25, 51]},
    ModelKind.SVM: {"c": [0.1, 1.0, 10.0], "epochs": [150, 300]},
    ModelKind.GRADIENT_BOOST: {
        "n_rounds": [40, 80, 150],
        "max_depth": [2, 3, 4],
        "learning_rate": [0.05, 0.1, 0.3],
    },
}


def default_params(kind: ModelKind) -> Hyperparams:
    return PARAMS_FOR_KIND[ModelKind(kind)]()


def train(kind: ModelKind, hp: Hyperparams, train_set: Dataset) -> BaseModel:
    """Fit a classifier of the given kind; deterministic given (hp, data)."""
    kind = ModelKind(kind)
    expected = PARAMS_FOR_KIND[kind]
    if not isinstance(hp, expected):
        raise TypeError(f"{kind.value} needs {expected.__name__}, got {type(hp).__name__}")
    if train_set.n_rows == 0:
        raise EmptyTrainingSet("training dataset has no rows")
    if kind in NORMALIZED_KINDS and train_set.normalization is None:
        raise ValueError(f"{kind.value} requires the normalized dataset copy")
    model = MODEL_FOR_KIND[kind](hp, train_set.feature_names)
    return model.fit(train_set.X, train_set.y)


def predict_table(model: BaseModel, dataset: Dataset) -> np.ndarray:
    """Predicted classes for a dataset, with feature-name alignment checks."""
    if tuple(dataset.feature_names) != tuple(model.feature_names):
        raise FeatureMismatch(
            f"dataset features {dataset.feature_names} do not match "
            f"model features {model.feature_names}"
        )
    return model.predict_matrix(dataset.X)


# ---------------------------------------------------------------------------
# serialization

def model_to_dict(model: BaseModel) -> dict:
    return {
        "format_version": MODEL_FORMAT_VERSION,
        "kind": model.kind.value,
        "hyperparams": asdict(model.hp),
        "feature_names": list(model.feature_names),
        "state": model.state_dict(),
    }


def model_from_dict(d: dict) -> BaseModel:
    version = d.get("format_version")
    if version != MODEL_FORMAT_VERSION:
        raise VersionMismatch(
            f"model format version {version!r} not supported (expected {MODEL_FORMAT_VERSION})"
        )
    kind = ModelKind(d["kind"])
    hp = PARAMS_FOR_KIND[kind](**d["hyperparams"])
    model = MODEL_FOR_KIND[kind](hp, tuple(d["feature_names"]))
    return model.load_state(d["state"])


def save_model(model: BaseModel, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(model_to_dict(model), fh, sort_keys=True)


def load_model(path) -> BaseModel:
    with open(path, encoding="utf-8") as fh:
        return model_from_dict(json.load(fh))


# ---------------------------------------------------------------------------
# hyperparameter search

@dataclass(frozen=True)
class Exhaustive:
    pass


@dataclass(frozen=True)
class Randomized:
    n_samples: int
    seed: int = 0


def _grid_points(kind: ModelKind, grid: dict[str, list], base: Hyperparams | None):
    base = base if base is not None else default_params(kind)
    keys = list(grid.keys())
    for combo in itertools.product(*(grid[k] for k in keys)):
        yield replace(base, **dict(zip(keys, combo)))


def time_ordered_folds(dataset: Dataset, folds: int) -> list[tuple[np.ndarray, np.ndarray]]:
    """(train_rows, val_rows) pairs: block i validates on everything after
    blocks 0..i-1, fixture-aligned, no shuffling."""
    if folds < 2:
        raise InsufficientData("need at least 2 folds")
    groups = dataset.fixture_row_groups()
    if len(groups) < folds:
        raise InsufficientData(f"{len(groups)} fixtures cannot fill {folds} folds")
    chunk_ids = np.array_split(np.arange(len(groups)), folds)
    out = []
    for i in range(1, folds):
        train_rows = np.concatenate([groups[g] for c in chunk_ids[:i] for g in c])
        val_rows = np.concatenate([groups[g] for g in chunk_ids[i]])
        out.append((train_rows, val_rows))
    return out


def grid_search(
    kind: ModelKind,
    grid: dict[str, list],
    train_set: Dataset,
    folds: int,
    mode: Exhaustive | Randomized = Exhaustive(),
    base: Hyperparams | None = None,
) -> tuple[Hyperparams, list[tuple[Hyperparams, float]]]:
    """Time-ordered cross-validated search over a parameter grid.

    Fold i trains on all earlier folds and validates on fold i, so no
    validation row ever predates a training row. Ties on mean accuracy
    go to the earlier grid point.
    """
    if not grid:
        raise ValueError("empty grid")
    kind = ModelKind(kind)
    candidates = list(_grid_points(kind, grid, base))
    if isinstance(mode, Randomized):
        rng = np.random.default_rng(mode.seed)
        take = min(mode.n_samples, len(candidates))
        picked = np.sort(rng.choice(len(candidates), size=take, replace=False))
        candidates = [candidates[i] for i in picked]

    fold_rows = time_ordered_folds(train_set, folds)
    table: list[tuple[Hyperparams, float]] = []
    for hp in candidates:
        scores = []
        for train_rows, val_rows in fold_rows:
            fold_train = train_set.take_rows(train_rows)
            fold_val = train_set.take_rows(val_rows)
            model = train(kind, hp, fold_train)
            scores.append(accuracy(fold_val.y, model.predict_matrix(fold_val.X)))
        table.append((hp, float(np.mean(scores))))

    best_hp, _ = max(enumerate(table), key=lambda t: (t[1][1], -t[0]))[1]
    return best_hp, table
