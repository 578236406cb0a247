"""Binned decision-tree growth shared by the forest and boosting models.

Features are discretized once per training set into rank-based bins whose
boundaries are actual training values, so a split `x <= boundary` is
invariant under strictly monotone per-feature transforms. Binning is
lossless while a feature has at most MAX_BINS distinct training values
(always the case at property-test scale); beyond that it is the usual
histogram approximation.

Trees grow breadth-first: every node of a level is scored with one
batched ``np.bincount`` over (node, feature, bin[, class]) keys, which
keeps the Python overhead per level rather than per node.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

MAX_BINS = 128


@dataclass(frozen=True)
class BinnedMatrix:
    codes: np.ndarray  # (n, d) int32; code j means value <= boundaries[f][j]
    boundaries: list[np.ndarray]
    n_bins: np.ndarray  # (d,) number of boundaries per feature

    @property
    def n_rows(self) -> int:
        return self.codes.shape[0]

    @property
    def n_features(self) -> int:
        return self.codes.shape[1]


def bin_matrix(X: np.ndarray, max_bins: int = MAX_BINS) -> BinnedMatrix:
    n, d = X.shape
    codes = np.empty((n, d), dtype=np.int32)
    boundaries = []
    for f in range(d):
        col = X[:, f]
        uniq = np.unique(col)
        if len(uniq) > max_bins:
            pick = np.round(np.linspace(0, len(uniq) - 1, max_bins)).astype(int)
            uniq = uniq[np.unique(pick)]
        boundaries.append(uniq)
        codes[:, f] = np.searchsorted(uniq, col, side="left")
    n_bins = np.array([len(b) for b in boundaries], dtype=np.int32)
    return BinnedMatrix(codes=codes, boundaries=boundaries, n_bins=n_bins)


@dataclass
class Tree:
    """Flat-array binary tree; feature == -1 marks a leaf."""

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    leaf_value: np.ndarray

    def predict(self, X: np.ndarray) -> np.ndarray:
        node = np.zeros(X.shape[0], dtype=np.int32)
        while True:
            f = self.feature[node]
            active = np.nonzero(f >= 0)[0]
            if active.size == 0:
                return self.leaf_value[node]
            cur = node[active]
            go_left = X[active, f[active]] <= self.threshold[cur]
            node[active] = np.where(go_left, self.left[cur], self.right[cur])

    def to_lists(self) -> dict:
        return {
            "feature": self.feature.tolist(),
            "threshold": self.threshold.tolist(),
            "left": self.left.tolist(),
            "right": self.right.tolist(),
            "leaf_value": self.leaf_value.tolist(),
        }

    @classmethod
    def from_lists(cls, d: dict) -> "Tree":
        return cls(
            feature=np.array(d["feature"], dtype=np.int32),
            threshold=np.array(d["threshold"], dtype=float),
            left=np.array(d["left"], dtype=np.int32),
            right=np.array(d["right"], dtype=np.int32),
            leaf_value=np.array(d["leaf_value"], dtype=float),
        )


class _TreeBuilder:
    """Accumulates node arrays while a level-wise grower runs."""

    def __init__(self):
        self.feature: list[int] = []
        self.threshold: list[float] = []
        self.left: list[int] = []
        self.right: list[int] = []
        self.leaf_value: list[float] = []

    def add(self) -> int:
        self.feature.append(-1)
        self.threshold.append(0.0)
        self.left.append(-1)
        self.right.append(-1)
        self.leaf_value.append(0.0)
        return len(self.feature) - 1

    def done(self) -> Tree:
        return Tree(
            feature=np.array(self.feature, dtype=np.int32),
            threshold=np.array(self.threshold, dtype=float),
            left=np.array(self.left, dtype=np.int32),
            right=np.array(self.right, dtype=np.int32),
            leaf_value=np.array(self.leaf_value, dtype=float),
        )


def _sample_features(rng, n_active: int, d: int, d_sub: int) -> np.ndarray:
    """Per-node feature subsets, each sorted ascending (ties favour low ids)."""
    if d_sub >= d:
        return np.broadcast_to(np.arange(d, dtype=np.int32), (n_active, d))
    r = rng.random((n_active, d))
    fs = np.argpartition(r, d_sub - 1, axis=1)[:, :d_sub].astype(np.int32)
    fs.sort(axis=1)
    return fs


def grow_gini_tree(
    binned: BinnedMatrix,
    y: np.ndarray,
    weights: np.ndarray,
    max_depth: int | None,
    min_samples_leaf: int,
    max_features: int,
    rng: np.random.Generator,
    importance_out: np.ndarray | None = None,
) -> Tree:
    """CART-style 3-class tree on bootstrap weights, Gini criterion.

    Impure nodes split at the best-scoring (feature, bin) even when the
    impurity decrease is zero, so consistently-labelled data is always
    driven to purity (XOR-like interactions included).
    """
    codes, n_bins = binned.codes, binned.n_bins
    n, d = codes.shape
    d_sub = min(max_features, d)
    depth_cap = np.inf if max_depth is None else max_depth

    tb = _TreeBuilder()
    w = weights.astype(float)
    rows = np.nonzero(weights > 0)[0].astype(np.int32)
    root_w = float(w[rows].sum())
    slot_nodes = np.array([tb.add()], dtype=np.int32)
    slot = np.zeros(len(rows), dtype=np.int32)
    depth = 0

    while slot_nodes.size:
        n_active = slot_nodes.size
        fs = _sample_features(rng, n_active, d, d_sub)
        B = int(n_bins[fs].max())

        C = codes[rows[:, None], fs[slot]]  # (R, d_sub)
        key = (slot[:, None].astype(np.int64) * d_sub + np.arange(d_sub)) * (B * 3)
        key += C * 3 + y[rows][:, None]
        hist = np.bincount(
            key.ravel(), weights=np.repeat(w[rows], d_sub), minlength=n_active * d_sub * B * 3
        ).reshape(n_active, d_sub, B, 3)

        L = hist.cumsum(axis=2)
        tot = L[:, 0, -1, :]  # (n_active, 3) class totals per node
        nL = L.sum(axis=3)
        nT = tot.sum(axis=1)
        nR = nT[:, None, None] - nL
        SL = np.square(L).sum(axis=3)
        SR = np.square(tot[:, None, None, :] - L).sum(axis=3)
        score = SL / np.maximum(nL, 1e-300) + SR / np.maximum(nR, 1e-300)

        usable = (
            (nL >= min_samples_leaf)
            & (nR >= min_samples_leaf)
            & (np.arange(B)[None, None, :] < n_bins[fs][:, :, None] - 1)
        )
        score = np.where(usable, score, -np.inf)

        flat = score.reshape(n_active, -1)
        best = flat.argmax(axis=1)
        best_score = flat[np.arange(n_active), best]
        j_star, t_star = np.divmod(best, B)
        f_star = fs[np.arange(n_active), j_star]

        impure = tot.max(axis=1) < nT - 1e-9
        do_split = impure & np.isfinite(best_score) & (depth < depth_cap)

        # finalize leaves (majority class, ties to the lowest code)
        for s in np.nonzero(~do_split)[0]:
            tb.leaf_value[slot_nodes[s]] = float(np.argmax(tot[s]))

        split_slots = np.nonzero(do_split)[0]
        if split_slots.size == 0:
            break

        if importance_out is not None:
            parent_score = np.square(tot).sum(axis=1) / np.maximum(nT, 1e-300)
            gains = (best_score[split_slots] - parent_score[split_slots]) / root_w
            np.add.at(importance_out, f_star[split_slots], np.maximum(gains, 0.0))

        child_rank = np.full(n_active, -1, dtype=np.int32)
        child_rank[split_slots] = np.arange(split_slots.size)
        new_nodes = np.empty(2 * split_slots.size, dtype=np.int32)
        for r, s in enumerate(split_slots):
            node = slot_nodes[s]
            lid, rid = tb.add(), tb.add()
            f = int(f_star[s])
            tb.feature[node] = f
            tb.threshold[node] = float(binned.boundaries[f][int(t_star[s])])
            tb.left[node], tb.right[node] = lid, rid
            new_nodes[2 * r], new_nodes[2 * r + 1] = lid, rid

        keep = do_split[slot]
        rows = rows[keep]
        s_kept = slot[keep]
        went_left = codes[rows, f_star[s_kept]] <= t_star[s_kept]
        slot = 2 * child_rank[s_kept] + np.where(went_left, 0, 1).astype(np.int32)
        slot_nodes = new_nodes
        depth += 1

    return tb.done()


def grow_xgb_tree(
    binned: BinnedMatrix,
    grad: np.ndarray,
    hess: np.ndarray,
    max_depth: int,
    l2_lambda: float,
    importance_out: np.ndarray | None = None,
) -> tuple[Tree, np.ndarray]:
    """Second-order regression tree: leaf weight -G/(H+lambda), split gain
    G_L^2/(H_L+λ) + G_R^2/(H_R+λ) - G^2/(H+λ); splits need positive gain.

    Returns the tree plus the fitted weight for every training row (so the
    booster can update raw scores without re-traversing).
    """
    codes, n_bins = binned.codes, binned.n_bins
    n, d = codes.shape
    lam = l2_lambda

    tb = _TreeBuilder()
    train_pred = np.zeros(n)
    rows = np.arange(n, dtype=np.int32)
    slot_nodes = np.array([tb.add()], dtype=np.int32)
    slot = np.zeros(n, dtype=np.int32)
    depth = 0
    fs_row = np.arange(d, dtype=np.int64)
    B = int(n_bins.max())

    while slot_nodes.size:
        n_active = slot_nodes.size
        C = codes[rows]  # all features, no per-node sampling
        key = (slot[:, None].astype(np.int64) * d + fs_row) * B + C
        minlen = n_active * d * B
        flat_key = key.ravel()
        cnt = np.bincount(flat_key, minlength=minlen).reshape(n_active, d, B)
        G = np.bincount(flat_key, weights=np.repeat(grad[rows], d), minlength=minlen).reshape(
            n_active, d, B
        )
        H = np.bincount(flat_key, weights=np.repeat(hess[rows], d), minlength=minlen).reshape(
            n_active, d, B
        )

        cntL = cnt.cumsum(axis=2)
        GL = G.cumsum(axis=2)
        HL = H.cumsum(axis=2)
        cntT = cntL[:, 0, -1]
        GT = GL[:, 0, -1]
        HT = HL[:, 0, -1]
        cntR = cntT[:, None, None] - cntL
        GR = GT[:, None, None] - GL
        HR = HT[:, None, None] - HL

        parent = np.square(GT) / (HT + lam)
        gain = (
            np.square(GL) / (HL + lam)
            + np.square(GR) / (HR + lam)
            - parent[:, None, None]
        )
        usable = (
            (cntL >= 1)
            & (cntR >= 1)
            & (np.arange(B)[None, None, :] < n_bins[None, :, None] - 1)
        )
        gain = np.where(usable, gain, -np.inf)

        flat = gain.reshape(n_active, -1)
        best = flat.argmax(axis=1)
        best_gain = flat[np.arange(n_active), best]
        f_star, t_star = np.divmod(best, B)

        do_split = (best_gain > 1e-12) & (depth < max_depth)

        for s in np.nonzero(~do_split)[0]:
            node = slot_nodes[s]
            tb.leaf_value[node] = float(-GT[s] / (HT[s] + lam))

        split_slots = np.nonzero(do_split)[0]
        leaf_slots = np.nonzero(~do_split)[0]
        if leaf_slots.size:
            leafed = ~do_split[slot]
            vals = np.array([tb.leaf_value[slot_nodes[s]] for s in leaf_slots])
            rank = np.full(n_active, -1, dtype=np.int32)
            rank[leaf_slots] = np.arange(leaf_slots.size)
            train_pred[rows[leafed]] = vals[rank[slot[leafed]]]
        if split_slots.size == 0:
            break

        if importance_out is not None:
            np.add.at(
                importance_out, f_star[split_slots], 0.5 * best_gain[split_slots]
            )

        child_rank = np.full(n_active, -1, dtype=np.int32)
        child_rank[split_slots] = np.arange(split_slots.size)
        new_nodes = np.empty(2 * split_slots.size, dtype=np.int32)
        for r, s in enumerate(split_slots):
            node = slot_nodes[s]
            lid, rid = tb.add(), tb.add()
            f = int(f_star[s])
            tb.feature[node] = f
            tb.threshold[node] = float(binned.boundaries[f][int(t_star[s])])
            tb.left[node], tb.right[node] = lid, rid
            new_nodes[2 * r], new_nodes[2 * r + 1] = lid, rid

        keep = do_split[slot]
        rows = rows[keep]
        s_kept = slot[keep]
        went_left = codes[rows, f_star[s_kept]] <= t_star[s_kept]
        slot = 2 * child_rank[s_kept] + np.where(went_left, 0, 1).astype(np.int32)
        slot_nodes = new_nodes
        depth += 1

    return tb.done(), train_pred
