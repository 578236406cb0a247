"""Feature-subset selection: recursive elimination and correlation ranking.

Correlating features against the ordinal result code {0, 1, 2} treats an
unordered outcome as a number; that is statistically dubious but it is
the selection rule being reproduced, so it is implemented as stated.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import models
from .dataset import Dataset
from .models import BaseModel, Hyperparams, ModelKind


class KOutOfRange(ValueError):
    pass


class TooFewRows(ValueError):
    pass


class SelectionMethod(str, Enum):
    ALL = "all"
    RFE = "rfe"
    CORRELATION = "correlation"


@dataclass(frozen=True)
class FeatureSubset:
    method: SelectionMethod
    names: tuple[str, ...]
    k: int
    eliminated: tuple[str, ...] = ()  # RFE removal order, first-out first

    def to_dict(self) -> dict:
        return {
            "method": self.method.value,
            "names": list(self.names),
            "k": self.k,
            "eliminated": list(self.eliminated),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> "FeatureSubset":
        return cls(
            method=SelectionMethod(d["method"]),
            names=tuple(d["names"]),
            k=int(d["k"]),
            eliminated=tuple(d.get("eliminated", ())),
        )


def all_features(dataset: Dataset) -> FeatureSubset:
    return FeatureSubset(
        method=SelectionMethod.ALL,
        names=tuple(dataset.feature_names),
        k=dataset.n_features,
    )


def rfe(kind: ModelKind, hp: Hyperparams, train_set: Dataset, k: int) -> FeatureSubset:
    """Drop the lowest-importance feature one at a time until k remain.

    Importance ties remove the feature later in the current column order.
    """
    if not (1 <= k <= train_set.n_features):
        raise KOutOfRange(f"k={k} not in [1, {train_set.n_features}]")

    current = list(train_set.feature_names)
    eliminated: list[str] = []
    while len(current) > k:
        model: BaseModel = models.train(kind, hp, train_set.select_features(current))
        scores = dict(model.feature_importance())
        low = min(scores.values())
        victim = [f for f in current if scores[f] == low][-1]
        current.remove(victim)
        eliminated.append(victim)

    return FeatureSubset(
        method=SelectionMethod.RFE, names=tuple(current), k=k, eliminated=tuple(eliminated)
    )


@dataclass(frozen=True)
class CorrelationMatrix:
    labels: tuple[str, ...]
    values: np.ndarray  # symmetric, unit diagonal, entries in [-1, 1]

    def to_dict(self) -> dict:
        return {"labels": list(self.labels), "values": [list(map(float, r)) for r in self.values]}

    def to_csv(self) -> str:
        lines = ["," + ",".join(self.labels)]
        for name, row in zip(self.labels, self.values):
            lines.append(name + "," + ",".join(f"{v:.12g}" for v in row))
        return "\n".join(lines) + "\n"


def _pearson_columns(cols: np.ndarray) -> np.ndarray:
    centred = cols - cols.mean(axis=0)
    norms = np.sqrt(np.square(centred).sum(axis=0))
    safe = np.where(norms > 0, norms, 1.0)
    r = (centred.T @ centred) / np.outer(safe, safe)
    r = np.clip((r + r.T) / 2.0, -1.0, 1.0)  # exact symmetry
    r[norms == 0, :] = 0.0
    r[:, norms == 0] = 0.0
    np.fill_diagonal(r, 1.0)
    return r


def correlation_matrix(dataset: Dataset, include_target: bool = False) -> CorrelationMatrix:
    """Pairwise Pearson r over feature columns (plus the numeric label).

    Constant columns correlate 0 with everything; their diagonal entry is
    defined as 1.
    """
    if dataset.n_rows < 2:
        raise TooFewRows("correlation needs at least 2 rows")
    labels = list(dataset.feature_names)
    cols = dataset.X
    if include_target:
        labels.append("result")
        cols = np.column_stack([cols, dataset.y.astype(float)])
    return CorrelationMatrix(labels=tuple(labels), values=_pearson_columns(cols))


def target_correlations(dataset: Dataset) -> dict[str, float]:
    """|Pearson r| of each feature against the ordinal result code."""
    cm = correlation_matrix(dataset, include_target=True)
    target_row = cm.values[-1, :-1]
    return {name: abs(float(r)) for name, r in zip(dataset.feature_names, target_row)}


def select_by_correlation(dataset: Dataset, k: int) -> FeatureSubset:
    """Top-k features by |r| against the label; ties break lexically."""
    if not (1 <= k <= dataset.n_features):
        raise KOutOfRange(f"k={k} not in [1, {dataset.n_features}]")
    strength = target_correlations(dataset)
    ordered = sorted(dataset.feature_names, key=lambda f: (-strength[f], f))
    return FeatureSubset(method=SelectionMethod.CORRELATION, names=tuple(ordered[:k]), k=k)
