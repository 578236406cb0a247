"""Shared classifier contract: kinds, hyperparameters, prediction surface.

All four models predict the three result codes (0 draw, 1 win, 2 loss)
and expose probability triples that sum to 1. Ties in argmax predictions
always go to the lowest class code.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from ..odds import ProbTriple

CLASSES = (0, 1, 2)


class ModelKind(str, Enum):
    RANDOM_FOREST = "random_forest"
    KNN = "knn"
    SVM = "svm"
    GRADIENT_BOOST = "gradient_boost"


class EmptyTrainingSet(ValueError):
    pass


class KTooLarge(ValueError):
    pass


class NonFiniteFeature(ValueError):
    pass


class FeatureMismatch(ValueError):
    pass


class VersionMismatch(ValueError):
    pass


@dataclass(frozen=True)
class RandomForestParams:
    n_trees: int = 500
    max_depth: int | None = 10
    min_samples_leaf: int = 1
    max_features: int | None = None  # None = round(sqrt(d))
    seed: int = 0

    def __post_init__(self):
        if self.n_trees < 1 or self.min_samples_leaf < 1:
            raise ValueError("n_trees and min_samples_leaf must be >= 1")
        if self.max_depth is not None and self.max_depth < 1:
            raise ValueError("max_depth must be >= 1 or None")
        if self.max_features is not None and self.max_features < 1:
            raise ValueError("max_features must be >= 1 or None")


@dataclass(frozen=True)
class KnnParams:
    k: int = 25
    metric: str = "euclidean"

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.metric != "euclidean":
            raise ValueError(f"unsupported metric {self.metric!r}")


@dataclass(frozen=True)
class SvmParams:
    c: float = 1.0
    epochs: int = 300
    learning_rate: float = 0.1
    seed: int = 0

    def __post_init__(self):
        if not (self.c > 0):
            raise ValueError("c must be positive")
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")
        if not (self.learning_rate > 0):
            raise ValueError("learning_rate must be positive")


@dataclass(frozen=True)
class GradientBoostParams:
    n_rounds: int = 80
    max_depth: int = 3
    learning_rate: float = 0.1
    l2_lambda: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.n_rounds < 1 or self.max_depth < 1:
            raise ValueError("n_rounds and max_depth must be >= 1")
        # learning_rate 0 is allowed: the boosted scores stay at the
        # base-rate prior, which the contract relies on
        if not (0.0 <= self.learning_rate <= 1.0):
            raise ValueError("learning_rate must be in [0, 1]")
        if self.l2_lambda < 0:
            raise ValueError("l2_lambda must be >= 0")


Hyperparams = RandomForestParams | KnnParams | SvmParams | GradientBoostParams

PARAMS_FOR_KIND = {
    ModelKind.RANDOM_FOREST: RandomForestParams,
    ModelKind.KNN: KnnParams,
    ModelKind.SVM: SvmParams,
    ModelKind.GRADIENT_BOOST: GradientBoostParams,
}


class BaseModel:
    """Fitted-classifier surface shared by all four kinds."""

    kind: ModelKind
    classes = CLASSES

    def __init__(self, hp, feature_names: tuple[str, ...]):
        self.hp = hp
        self.feature_names = tuple(feature_names)

    @property
    def n_features(self) -> int:
        return len(self.feature_names)

    def proba_matrix(self, X: np.ndarray) -> np.ndarray:
        """(n, 3) class probabilities; rows sum to 1."""
        raise NotImplementedError

    def _check_matrix(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        if X.ndim != 2 or X.shape[1] != self.n_features:
            raise FeatureMismatch(
                f"expected {self.n_features} features, got shape {X.shape}"
            )
        return X

    def _check_row(self, row) -> np.ndarray:
        row = np.asarray(row, dtype=float)
        if row.shape != (self.n_features,):
            raise FeatureMismatch(
                f"expected a feature vector of length {self.n_features}, got shape {row.shape}"
            )
        return row.reshape(1, -1)

    def predict_proba(self, row) -> ProbTriple:
        p = self.proba_matrix(self._check_row(row))[0]
        return ProbTriple(p_draw=float(p[0]), p_home=float(p[1]), p_away=float(p[2]))

    def predict(self, row) -> int:
        p = self.proba_matrix(self._check_row(row))[0]
        return int(np.argmax(p))  # first max wins: lowest class code

    def predict_matrix(self, X) -> np.ndarray:
        return np.argmax(self.proba_matrix(self._check_matrix(X)), axis=1)

    def vote_counts(self, row) -> dict[int, int] | None:
        """Raw ensemble/neighbour votes per class, where the kind has them."""
        return None

    def feature_importance(self) -> list[tuple[str, float]]:
        """(feature, score) pairs, scores >= 0, sorted descending (stable)."""
        scores = self._importance_scores()
        order = sorted(range(len(scores)), key=lambda i: -scores[i])
        return [(self.feature_names[i], float(scores[i])) for i in order]

    def _importance_scores(self) -> np.ndarray:
        raise NotImplementedError

    def state_dict(self) -> dict:
        raise NotImplementedError


def check_training_inputs(X: np.ndarray, y: np.ndarray) -> None:
    if X.shape[0] == 0:
        raise EmptyTrainingSet("training set has no rows")
    if not np.all(np.isfinite(X)):
        raise NonFiniteFeature("training features contain non-finite values")


def softmax(z: np.ndarray) -> np.ndarray:
    """Row-wise stable softmax."""
    z = np.asarray(z, dtype=float)
    shifted = z - z.max(axis=-1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=-1, keepdims=True)
