"""Single probabilistic decision trees.

Trees are grown greedily top-down on numeric features with axis-aligned,
left-inclusive splits (``x[feature] <= threshold``). Candidate thresholds are
midpoints between consecutive distinct sorted values of each candidate
feature; at every node a random subset of ceil(sqrt(D)) features is examined
and the split with the lowest weighted Gini impurity wins, ties broken by
lowest feature index and then lowest threshold. Leaves store the raw class
counts of the training instances they received; query-time probabilities are
Laplace-corrected relative frequencies, so every class has strictly positive
probability.
"""

from dataclasses import dataclass
from typing import Union

import numpy as np

from .validation import check_feature_matrix, check_feature_vector


@dataclass(frozen=True)
class TreeConfig:
    """Stopping rules for tree induction."""

    max_depth: int = 10
    min_samples_split: int = 2

    def __post_init__(self):
        if self.max_depth < 0:
            raise ValueError(f"max_depth must be >= 0, got {self.max_depth}")
        if self.min_samples_split < 2:
            raise ValueError(f"min_samples_split must be >= 2, got {self.min_samples_split}")


@dataclass
class Leaf:
    counts: np.ndarray  # per-class training counts, length K

    @property
    def total(self):
        return int(self.counts.sum())


@dataclass
class Internal:
    feature: int
    threshold: float
    left: "TreeNode"
    right: "TreeNode"


TreeNode = Union[Leaf, Internal]


@dataclass
class DecisionTree:
    """A fitted decision tree over ``class_count`` classes and D features."""

    root: TreeNode
    depth: int
    class_count: int
    n_features: int

    def leaf_counts(self, x):
        """Class counts ``(counts, total)`` of the unique leaf containing ``x``."""
        x = check_feature_vector(x, self.n_features)
        node = self.root
        while isinstance(node, Internal):
            node = node.left if x[node.feature] <= node.threshold else node.right
        return node.counts, node.total

    def predict_proba(self, x):
        """Laplace-corrected class distribution of the leaf containing ``x``."""
        counts, total = self.leaf_counts(x)
        return (counts + 1.0) / (total + self.class_count)

    def leaf_counts_batch(self, X):
        """Vectorized routing: per-row leaf class counts as an (n, K) array."""
        X = np.asarray(X, dtype=np.float64)
        out = np.empty((X.shape[0], self.class_count), dtype=np.int64)
        self._route(self.root, X, np.arange(X.shape[0]), out)
        return out

    def _route(self, node, X, idx, out):
        if isinstance(node, Leaf):
            out[idx] = node.counts
            return
        if idx.size == 0:
            return
        mask = X[idx, node.feature] <= node.threshold
        self._route(node.left, X, idx[mask], out)
        self._route(node.right, X, idx[~mask], out)

    def leaves(self):
        """All leaves, left to right."""
        out = []
        stack = [self.root]
        while stack:
            node = stack.pop()
            if isinstance(node, Leaf):
                out.append(node)
            else:
                stack.extend([node.right, node.left])
        return out

    def to_dict(self):
        return _node_to_dict(self.root)

    @classmethod
    def from_dict(cls, data, class_count, n_features):
        root = _node_from_dict(data, class_count)
        return cls(root, _node_depth(root), class_count, n_features)


def _node_to_dict(node):
    if isinstance(node, Leaf):
        return {"counts": [int(c) for c in node.counts]}
    return {"feature": int(node.feature), "threshold": float(node.threshold),
            "left": _node_to_dict(node.left), "right": _node_to_dict(node.right)}


def _node_from_dict(data, class_count):
    if "counts" in data:
        counts = np.asarray(data["counts"], dtype=np.int64)
        if counts.shape != (class_count,):
            raise ValueError(f"leaf counts have length {counts.size}, expected {class_count}")
        return Leaf(counts)
    return Internal(int(data["feature"]), float(data["threshold"]),
                    _node_from_dict(data["left"], class_count),
                    _node_from_dict(data["right"], class_count))


def _node_depth(node):
    if isinstance(node, Leaf):
        return 0
    return 1 + max(_node_depth(node.left), _node_depth(node.right))


def fit_tree(train, config=TreeConfig(), rng=None):
    """Fit a single decision tree on a Dataset.

    ``rng`` is a numpy Generator; it supplies the per-node candidate feature
    subsets and is the only source of randomness.
    """
    if rng is None:
        rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(0)))
    X = check_feature_matrix(train.features, name="train features")
    y = train.labels
    return _fit_arrays(X, y, train.class_count, config, rng)


def _fit_arrays(X, y, class_count, config, rng):
    n, d = X.shape
    m = int(np.ceil(np.sqrt(d)))
    # Candidate feature subsets for every potential split, drawn up front from
    # the tree's stream and consumed in depth-first, left-before-right order.
    # A tree over n rows has at most 2n-1 nodes.
    subsets = np.argsort(rng.random((2 * n + 1, d)), axis=1)[:, :m]
    subsets.sort(axis=1)
    state = {"next_subset": 0, "depth": 0}

    def grow(idx, depth):
        state["depth"] = max(state["depth"], depth)
        counts = np.bincount(y[idx], minlength=class_count)
        nn = idx.size
        if depth >= config.max_depth or nn < config.min_samples_split or counts.max() == nn:
            return Leaf(counts)
        feats = subsets[state["next_subset"]]
        state["next_subset"] += 1
        split = _best_split(X, y, idx, feats, counts, class_count)
        if split is None:
            return Leaf(counts)
        feature, threshold = split
        mask = X[idx, feature] <= threshold
        return Internal(int(feature), float(threshold),
                        grow(idx[mask], depth + 1), grow(idx[~mask], depth + 1))

    root = grow(np.arange(n, dtype=np.intp), 0)
    depth = state["depth"] if isinstance(root, Internal) else 0
    return DecisionTree(root, depth, class_count, d)


def _best_split(X, y, idx, feats, counts, class_count):
    """Lowest weighted-Gini split of a node over the candidate features.

    Returns (feature, threshold) or None when no candidate feature has two
    distinct values or no split matches the node's own impurity.
    """
    nn = idx.size
    values = X[np.ix_(idx, feats)]                          # (nn, m)
    order = np.argsort(values, axis=0, kind="stable")
    sorted_values = np.take_along_axis(values, order, axis=0)
    sorted_labels = y[idx][order]                           # (nn, m)

    onehot = sorted_labels[:, :, None] == np.arange(class_count)[None, None, :]
    cum = np.cumsum(onehot, axis=0)                         # (nn, m, K)
    left = cum[:-1].astype(np.float64)                      # boundary i keeps i+1 rows left
    right = counts.astype(np.float64)[None, None, :] - left
    n_left = np.arange(1, nn, dtype=np.float64)[:, None]
    n_right = nn - n_left
    gini_left = 1.0 - np.sum(left * left, axis=2) / (n_left * n_left)
    gini_right = 1.0 - np.sum(right * right, axis=2) / (n_right * n_right)
    weighted = (n_left * gini_left + n_right * gini_right) / nn   # (nn-1, m)

    valid = sorted_values[:-1] < sorted_values[1:]
    weighted = np.where(valid, weighted, np.inf)
    # Feature-major flattening makes argmin's first-occurrence rule implement
    # the tie-break: lowest feature index, then lowest threshold.
    flat = weighted.T.reshape(-1)
    best = int(np.argmin(flat))
    best_gini = flat[best]
    node_gini = 1.0 - float(np.sum((counts / nn) ** 2))
    if not np.isfinite(best_gini) or best_gini > node_gini:
        return None
    col, boundary = divmod(best, nn - 1)
    lo = sorted_values[boundary, col]
    hi = sorted_values[boundary + 1, col]
    threshold = lo + (hi - lo) / 2.0
    if threshold >= hi:  # midpoint rounded up to the right value
        threshold = lo
    return int(feats[col]), float(threshold)
