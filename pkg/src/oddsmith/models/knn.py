"""Brute-force k-nearest-neighbours on Euclidean distance.

Neighbours are ranked by (squared distance, training index): distance
ties resolve to the earlier training row. Probabilities are neighbour-
vote fractions. Expects the normalized dataset copy.

KNN has no built-in importance, so feature_importance runs permutation
importance on the training set (mean self-prediction accuracy drop over
PERM_SHUFFLES shuffles, fixed seed, negatives clamped to zero). For
training sets larger than PERM_QUERY_CAP, the accuracy is measured on a
deterministic query subsample; neighbours are always searched over the
full training set.
"""

from __future__ import annotations

import numpy as np

from .base import BaseModel, KnnParams, KTooLarge, ModelKind, check_training_inputs

PERM_SHUFFLES = 5
PERM_SEED = 0
PERM_QUERY_CAP = 128

# below this many element-ops, distances come from direct differences
# (bit-identical to a plain per-pair sum, which the oracle tests rely on)
_DIRECT_LIMIT = 1 << 22


class KnnModel(BaseModel):
    kind = ModelKind.KNN

    def __init__(self, hp: KnnParams, feature_names):
        super().__init__(hp, feature_names)
        self.X = np.empty((0, self.n_features))
        self.y = np.empty(0, dtype=int)

    def fit(self, X: np.ndarray, y: np.ndarray) -> "KnnModel":
        check_training_inputs(X, y)
        if self.hp.k > X.shape[0]:
            raise KTooLarge(f"k={self.hp.k} exceeds training size {X.shape[0]}")
        self.X = np.array(X, dtype=float)
        self.y = np.array(y, dtype=int)
        return self

    def _dist2(self, Xq: np.ndarray) -> np.ndarray:
        q, n, d = Xq.shape[0], self.X.shape[0], self.X.shape[1]
        if q * n * d <= _DIRECT_LIMIT:
            diff = Xq[:, None, :] - self.X[None, :, :]
            return np.square(diff).sum(axis=2)
        # expansion form for large blocks; clip tiny negatives from rounding
        d2 = (
            np.square(Xq).sum(axis=1)[:, None]
            + np.square(self.X).sum(axis=1)[None, :]
            - 2.0 * (Xq @ self.X.T)
        )
        return np.maximum(d2, 0.0)

    def _neighbour_votes(self, Xq: np.ndarray) -> np.ndarray:
        d2 = self._dist2(Xq)
        nearest = np.argsort(d2, axis=1, kind="stable")[:, : self.hp.k]
        votes = np.zeros((Xq.shape[0], 3), dtype=np.int64)
        np.add.at(votes, (np.arange(Xq.shape[0])[:, None], self.y[nearest]), 1)
        return votes

    def proba_matrix(self, X: np.ndarray) -> np.ndarray:
        X = self._check_matrix(X)
        return self._neighbour_votes(X) / self.hp.k

    def vote_counts(self, row) -> dict[int, int]:
        votes = self._neighbour_votes(self._check_row(row))[0]
        return {c: int(votes[c]) for c in self.classes}

    def _importance_scores(self) -> np.ndarray:
        n, d = self.X.shape
        rng = np.random.default_rng(PERM_SEED)
        if n > PERM_QUERY_CAP:
            queries = np.sort(rng.choice(n, size=PERM_QUERY_CAP, replace=False))
        else:
            queries = np.arange(n)
        Xq = self.X[queries]
        yq = self.y[queries]
        base = float(np.mean(self.predict_matrix(Xq) == yq))

        scores = np.zeros(d)
        for f in range(d):
            drops = []
            for _ in range(PERM_SHUFFLES):
                perm = rng.permutation(len(queries))
                Xp = Xq.copy()
                Xp[:, f] = Xq[perm, f]
                acc = float(np.mean(self.predict_matrix(Xp) == yq))
                drops.append(base - acc)
            scores[f] = max(0.0, float(np.mean(drops)))
        return scores

    def state_dict(self) -> dict:
        return {"X": self.X.tolist(), "y": self.y.tolist()}

    def load_state(self, state: dict) -> "KnnModel":
        self.X = np.array(state["X"], dtype=float).reshape(len(state["y"]), self.n_features)
        self.y = np.array(state["y"], dtype=int)
        return self
