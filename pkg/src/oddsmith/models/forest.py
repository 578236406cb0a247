"""Random forest: bagged Gini trees voting one class each.

Probabilities are tree-vote fractions, which is what the vote-count
tables in the forecast output are built from. A single-tree forest
skips the bootstrap and trains its one tree on the full sample, making
it exactly a plain decision tree.
"""

from __future__ import annotations

import math

import numpy as np

from ._tree import Tree, bin_matrix, grow_gini_tree
from .base import BaseModel, ModelKind, RandomForestParams, check_training_inputs


class RandomForestModel(BaseModel):
    kind = ModelKind.RANDOM_FOREST

    def __init__(self, hp: RandomForestParams, feature_names):
        super().__init__(hp, feature_names)
        self.trees: list[Tree] = []
        self._importances = np.zeros(self.n_features)

    def fit(self, X: np.ndarray, y: np.ndarray) -> "RandomForestModel":
        check_training_inputs(X, y)
        hp = self.hp
        n, d = X.shape
        binned = bin_matrix(X)
        d_sub = hp.max_features if hp.max_features is not None else max(1, round(math.sqrt(d)))
        d_sub = min(d_sub, d)

        seeds = np.random.SeedSequence(hp.seed).spawn(hp.n_trees)
        importance = np.zeros(d)
        self.trees = []
        for t in range(hp.n_trees):
            rng = np.random.default_rng(seeds[t])
            if hp.n_trees == 1:
                weights = np.ones(n, dtype=np.int64)
            else:
                weights = np.bincount(rng.integers(0, n, size=n), minlength=n)
            tree = grow_gini_tree(
                binned,
                y,
                weights,
                max_depth=hp.max_depth,
                min_samples_leaf=hp.min_samples_leaf,
                max_features=d_sub,
                rng=rng,
                importance_out=importance,
            )
            self.trees.append(tree)
        self._importances = importance / hp.n_trees
        return self

    def _vote_matrix(self, X: np.ndarray) -> np.ndarray:
        votes = np.zeros((X.shape[0], 3), dtype=np.int64)
        rows = np.arange(X.shape[0])
        for tree in self.trees:
            votes[rows, tree.predict(X).astype(int)] += 1
        return votes

    def proba_matrix(self, X: np.ndarray) -> np.ndarray:
        X = self._check_matrix(X)
        return self._vote_matrix(X) / len(self.trees)

    def vote_counts(self, row) -> dict[int, int]:
        votes = self._vote_matrix(self._check_row(row))[0]
        return {c: int(votes[c]) for c in self.classes}

    def _importance_scores(self) -> np.ndarray:
        return self._importances

    def state_dict(self) -> dict:
        return {
            "trees": [t.to_lists() for t in self.trees],
            "importances": self._importances.tolist(),
        }

    def load_state(self, state: dict) -> "RandomForestModel":
        self.trees = [Tree.from_lists(t) for t in state["trees"]]
        self._importances = np.array(state["importances"], dtype=float)
        return self
