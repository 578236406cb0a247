"""Gradient boosting with second-order (Newton) leaf weights.

One regression tree per class per round on the softmax cross-entropy
gradients; leaf weight is -G/(H + lambda). Raw scores start at the log
class priors, so with learning_rate 0 predictions are exactly the
training base rates. Training log-loss is recorded per round.
"""

from __future__ import annotations

import numpy as np

from ._tree import Tree, bin_matrix, grow_xgb_tree
from .base import BaseModel, GradientBoostParams, ModelKind, check_training_inputs, softmax

_PRIOR_FLOOR = 1e-12


def ce_loss(logits: np.ndarray, label: int) -> float:
    """Softmax cross-entropy of one 3-way logit vector."""
    p = softmax(np.asarray(logits, dtype=float))
    return float(-np.log(max(p[label], _PRIOR_FLOOR)))


def ce_grad_hess(logits: np.ndarray, label: int) -> tuple[np.ndarray, np.ndarray]:
    """Gradient p - onehot and diagonal Hessian p(1-p) of ce_loss."""
    p = softmax(np.asarray(logits, dtype=float))
    grad = p.copy()
    grad[label] -= 1.0
    hess = p * (1.0 - p)
    return grad, hess


class GradientBoostModel(BaseModel):
    kind = ModelKind.GRADIENT_BOOST

    def __init__(self, hp: GradientBoostParams, feature_names):
        super().__init__(hp, feature_names)
        self.init_score = np.zeros(3)
        self.trees: list[list[Tree]] = []  # [round][class]
        self.train_loss_curve: list[float] = []
        self._importances = np.zeros(self.n_features)

    def fit(self, X: np.ndarray, y: np.ndarray) -> "GradientBoostModel":
        check_training_inputs(X, y)
        hp = self.hp
        n = X.shape[0]
        binned = bin_matrix(X)
        onehot = np.zeros((n, 3))
        onehot[np.arange(n), y] = 1.0

        priors = np.maximum(onehot.mean(axis=0), _PRIOR_FLOOR)
        self.init_score = np.log(priors)
        F = np.tile(self.init_score, (n, 1))

        importance = np.zeros(X.shape[1])
        self.trees = []
        self.train_loss_curve = []
        for _ in range(hp.n_rounds):
            P = softmax(F)
            round_trees = []
            for c in range(3):
                g = P[:, c] - onehot[:, c]
                h = P[:, c] * (1.0 - P[:, c])
                tree, pred = grow_xgb_tree(
                    binned, g, h, hp.max_depth, hp.l2_lambda, importance_out=importance
                )
                F[:, c] += hp.learning_rate * pred
                round_trees.append(tree)
            self.trees.append(round_trees)
            P = softmax(F)
            self.train_loss_curve.append(
                float(-np.mean(np.log(np.maximum(P[np.arange(n), y], _PRIOR_FLOOR))))
            )
        self._importances = importance
        return self

    def raw_scores(self, X: np.ndarray) -> np.ndarray:
        X = self._check_matrix(X)
        F = np.tile(self.init_score, (X.shape[0], 1))
        for round_trees in self.trees:
            for c, tree in enumerate(round_trees):
                F[:, c] += self.hp.learning_rate * tree.predict(X)
        return F

    def proba_matrix(self, X: np.ndarray) -> np.ndarray:
        return softmax(self.raw_scores(X))

    def _importance_scores(self) -> np.ndarray:
        return self._importances

    def state_dict(self) -> dict:
        return {
            "init_score": self.init_score.tolist(),
            "trees": [[t.to_lists() for t in row] for row in self.trees],
            "importances": self._importances.tolist(),
            "train_loss_curve": list(self.train_loss_curve),
        }

    def load_state(self, state: dict) -> "GradientBoostModel":
        self.init_score = np.array(state["init_score"], dtype=float)
        self.trees = [[Tree.from_lists(t) for t in row] for row in state["trees"]]
        self._importances = np.array(state["importances"], dtype=float)
        self.train_loss_curve = list(state["train_loss_curve"])
        return self
