"""Linear one-vs-rest SVM trained by full-batch subgradient descent.

Per class c the objective is the regularized mean hinge loss

    J_c(w, b) = lam/2 ||w||^2 + mean_i max(0, 1 - t_i (w.x_i + b)),

with t_i = +1 for class c and -1 otherwise and lam = 1/(c_reg * n).
Steps decay as learning_rate / sqrt(1 + epoch). Deterministic (zero
init, no sampling); the seed field is carried for interface symmetry.
Probabilities are the softmax of the three decision values. Expects
the normalized dataset copy.
"""

from __future__ import annotations

import numpy as np

from .base import BaseModel, ModelKind, SvmParams, check_training_inputs, softmax


class LinearSvmModel(BaseModel):
    kind = ModelKind.SVM

    def __init__(self, hp: SvmParams, feature_names):
        super().__init__(hp, feature_names)
        self.W = np.zeros((3, self.n_features))
        self.b = np.zeros(3)
        self.objective_curve: list[float] = []

    def fit(self, X: np.ndarray, y: np.ndarray) -> "LinearSvmModel":
        check_training_inputs(X, y)
        n = X.shape[0]
        lam = 1.0 / (self.hp.c * n)
        T = np.where(np.arange(3)[None, :] == y[:, None], 1.0, -1.0)  # (n, 3)

        W = np.zeros((3, self.n_features))
        b = np.zeros(3)
        self.objective_curve = []
        for epoch in range(self.hp.epochs):
            margins = (X @ W.T + b) * T
            viol = margins < 1.0
            coeff = np.where(viol, T, 0.0)  # (n, 3)
            grad_W = lam * W - (coeff.T @ X) / n
            grad_b = -coeff.mean(axis=0)
            step = self.hp.learning_rate / np.sqrt(1.0 + epoch)
            W -= step * grad_W
            b -= step * grad_b

            hinge = np.maximum(0.0, 1.0 - (X @ W.T + b) * T).mean(axis=0)
            self.objective_curve.append(
                float((0.5 * lam * np.square(W).sum(axis=1) + hinge).sum())
            )
        self.W, self.b = W, b
        return self

    def decision_values(self, X: np.ndarray) -> np.ndarray:
        return self._check_matrix(X) @ self.W.T + self.b

    def proba_matrix(self, X: np.ndarray) -> np.ndarray:
        return softmax(self.decision_values(X))

    def _importance_scores(self) -> np.ndarray:
        return np.abs(self.W).mean(axis=0)

    def state_dict(self) -> dict:
        return {
            "W": self.W.tolist(),
            "b": self.b.tolist(),
            "objective_curve": list(self.objective_curve),
        }

    def load_state(self, state: dict) -> "LinearSvmModel":
        self.W = np.array(state["W"], dtype=float).reshape(3, self.n_features)
        self.b = np.array(state["b"], dtype=float)
        self.objective_curve = list(state["objective_curve"])
        return self
