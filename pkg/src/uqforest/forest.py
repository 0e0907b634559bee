"""Bootstrapped ensembles of decision trees.

Randomness is fully reproducible: every tree gets its own stream from the
counter-based Philox generator, keyed by ``SeedSequence(seed, spawn_key=(tree_index,))``.
Each stream first draws the tree's bootstrap sample (N rows with replacement)
and then the per-node candidate feature subsets, so refitting with the same
data and config yields a bit-identical forest regardless of fitting order.
"""

import json
from dataclasses import dataclass, field, replace

import numpy as np

from .dataset import Dataset
from .tree import DecisionTree, TreeConfig, _fit_arrays
from .validation import check_feature_matrix, check_feature_vector

FORMAT_VERSION = 1


@dataclass(frozen=True)
class ForestConfig:
    """Ensemble and experiment settings. The defaults (50 trees of depth at
    most 10, bootstrapped, 70/30 splits) are the reference setup."""

    n_trees: int = 50
    max_depth: int = 10
    min_samples_split: int = 2
    train_fraction: float = 0.7
    stratify: bool = False
    seed: int = 0

    def __post_init__(self):
        if self.n_trees < 1:
            raise ValueError(f"n_trees must be >= 1, got {self.n_trees}")
        TreeConfig(self.max_depth, self.min_samples_split)  # reuse validation
        if not 0.0 < self.train_fraction < 1.0:
            raise ValueError(f"train_fraction must be in (0, 1), got {self.train_fraction}")
        if not 0 <= self.seed < 2 ** 64:
            raise ValueError("seed must be a 64-bit unsigned integer")

    def tree_config(self):
        return TreeConfig(self.max_depth, self.min_samples_split)


@dataclass
class Forest:
    """A fitted ensemble of decision trees sharing one class mapping."""

    trees: list
    config: ForestConfig
    class_count: int
    n_features: int
    label_names: list = None
    feature_names: list = field(default=None, repr=False)

    @property
    def n_trees(self):
        return len(self.trees)

    def leaf_counts_batch(self, X):
        """Per-tree leaf class counts for every row: an (n, M, K) int array."""
        X = check_feature_matrix(X, self.n_features)
        out = np.empty((X.shape[0], self.n_trees, self.class_count), dtype=np.int64)
        for i, tree in enumerate(self.trees):
            out[:, i, :] = tree.leaf_counts_batch(X)
        return out

    def tree_probas_batch(self, X):
        """Per-tree Laplace-corrected distributions: an (n, M, K) float array."""
        counts = self.leaf_counts_batch(X)
        totals = counts.sum(axis=2, keepdims=True)
        return (counts + 1.0) / (totals + self.class_count)

    def mean_proba_batch(self, X):
        return self.tree_probas_batch(X).mean(axis=1)


def _tree_rng(seed, tree_index):
    return np.random.Generator(
        np.random.Philox(np.random.SeedSequence(seed, spawn_key=(tree_index,))))


def derive_seed(seed, *path):
    """A fresh 64-bit seed derived from a root seed and an index path."""
    ss = np.random.SeedSequence(seed, spawn_key=tuple(int(p) for p in path))
    return int(ss.generate_state(1, np.uint64)[0])


def fit_forest(train, config=ForestConfig()):
    """Fit ``config.n_trees`` trees, each on its own bootstrap sample of size N."""
    X = train.features
    n = train.n_rows
    tree_config = config.tree_config()
    trees = []
    for i in range(config.n_trees):
        rng = _tree_rng(config.seed, i)
        sample = rng.integers(0, n, size=n)
        trees.append(_fit_arrays(X[sample], train.labels[sample], train.class_count,
                                 tree_config, rng))
    return Forest(trees, config, train.class_count, train.n_features,
                  train.label_names, train.feature_names)


def predict_proba_all(forest, x):
    """The M per-tree class distributions for a single query, as an (M, K) array."""
    x = check_feature_vector(x, forest.n_features)
    return forest.tree_probas_batch(x[None, :])[0]


def mean_proba(forest, x):
    """Soft-vote distribution: component-wise mean of the per-tree distributions."""
    return predict_proba_all(forest, x).mean(axis=0)


def predict(forest, x):
    """Predicted class index: argmax of the mean distribution, ties to the lowest index."""
    return int(np.argmax(mean_proba(forest, x)))


def to_json_dict(forest):
    labels = forest.label_names if forest.label_names is not None else None
    if labels is not None:
        for value in labels:
            if not isinstance(value, (str, int, float, bool)):
                raise ValueError(f"label value {value!r} is not JSON-serializable")
    return {
        "format_version": FORMAT_VERSION,
        "config": {
            "n_trees": forest.config.n_trees,
            "max_depth": forest.config.max_depth,
            "min_samples_split": forest.config.min_samples_split,
            "train_fraction": forest.config.train_fraction,
            "stratify": forest.config.stratify,
            "seed": forest.config.seed,
        },
        "class_count": forest.class_count,
        "n_features": forest.n_features,
        "label_map": labels,
        "feature_names": forest.feature_names,
        "trees": [tree.to_dict() for tree in forest.trees],
    }


def from_json_dict(data):
    version = data.get("format_version")
    if version != FORMAT_VERSION:
        raise ValueError(f"unsupported model format_version {version!r}")
    config = ForestConfig(**data["config"])
    class_count = int(data["class_count"])
    n_features = int(data["n_features"])
    trees = [DecisionTree.from_dict(t, class_count, n_features) for t in data["trees"]]
    if len(trees) != config.n_trees:
        raise ValueError(f"model has {len(trees)} trees, config says {config.n_trees}")
    return Forest(trees, config, class_count, n_features,
                  data.get("label_map"), data.get("feature_names"))


def serialize_forest(forest):
    """Canonical JSON bytes; identical configs and data give identical bytes."""
    return json.dumps(to_json_dict(forest), sort_keys=True,
                      separators=(",", ":")).encode("utf-8")


def save_forest(forest, path):
    with open(path, "wb") as handle:
        handle.write(serialize_forest(forest))


def load_forest(path):
    with open(path, "rb") as handle:
        return from_json_dict(json.loads(handle.read().decode("utf-8")))


def with_seed(config, seed):
    """Copy of a config with a different seed (used for derived repetition seeds)."""
    return replace(config, seed=seed)
