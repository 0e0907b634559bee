"""Scikit-learn style estimator wrapping the uncertainty-aware forest."""

import warnings

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.exceptions import NotFittedError

from . import forest as forest_mod
from .dataset import Dataset, dense_labels
from .entropy import entropy_uncertainty
from .forest import ForestConfig, fit_forest
from .likelihood import DEFAULT_TOL, UnsupportedTaskError, rl_uncertainty_batch
from .validation import check_feature_matrix


class UncertaintyForestClassifier(BaseEstimator, ClassifierMixin):
    """Random forest classifier with per-prediction uncertainty estimates.

    Implements the standard fit/predict/predict_proba API so it drops into
    pipelines and model-selection utilities, and adds
    :meth:`predict_uncertainty` for the aleatoric/epistemic split. Trees use
    axis-aligned Gini splits on ceil(sqrt(D)) random features per node,
    bootstrap sampling, and Laplace-corrected leaf distributions; training is
    bit-reproducible for a fixed ``random_state``.

    Parameters
    ----------
    n_trees : int
        Ensemble size.
    max_depth : int
        Depth cap for every tree.
    min_samples_split : int
        Smallest node that may still be split.
    random_state : int
        Seed of the per-tree Philox streams.

    Attributes
    ----------
    classes_ : ndarray
        Original class labels, in order of first appearance in ``y``.
    forest_ : Forest
        The fitted ensemble.
    n_features_in_ : int
        Feature count seen during fit.
    """

    def __init__(self, n_trees=50, max_depth=10, min_samples_split=2, random_state=0):
        self.n_trees = n_trees
        self.max_depth = max_depth
        self.min_samples_split = min_samples_split
        self.random_state = random_state

    def fit(self, X, y):
        X = check_feature_matrix(X)
        y = np.asarray(y)
        if y.ndim != 1 or y.shape[0] != X.shape[0]:
            raise ValueError(f"y must be 1-D with {X.shape[0]} entries")
        codes, names = dense_labels(y)
        if len(names) < 2:
            warnings.warn("y contains a single class", UserWarning, stacklevel=2)
        train = Dataset(X, codes, max(len(names), 1), names)
        config = ForestConfig(n_trees=self.n_trees, max_depth=self.max_depth,
                              min_samples_split=self.min_samples_split,
                              seed=self.random_state)
        self.forest_ = fit_forest(train, config)
        self.classes_ = np.asarray(names)
        self.n_features_in_ = X.shape[1]
        return self

    def _check_fitted(self):
        if not hasattr(self, "forest_"):
            raise NotFittedError("this UncertaintyForestClassifier is not fitted yet; "
                                 "call fit first")

    def predict_proba(self, X):
        """Mean Laplace-corrected class distribution per row, shape (n, K)."""
        self._check_fitted()
        X = check_feature_matrix(X, self.n_features_in_)
        return self.forest_.mean_proba_batch(X)

    def predict(self, X):
        """Soft-vote prediction; returns labels from ``classes_``."""
        return self.classes_[np.argmax(self.predict_proba(X), axis=1)]

    def predict_uncertainty(self, X, method="entropy", tol=DEFAULT_TOL):
        """Per-row uncertainty estimates as a dict of arrays.

        ``method="entropy"`` returns ``{"total", "aleatoric", "epistemic"}``
        in bits, from the ensemble entropy decomposition. ``method="likelihood"``
        returns ``{"aleatoric", "epistemic"}`` in [0, 1], from the
        relative-likelihood supports (binary tasks only).
        """
        self._check_fitted()
        X = check_feature_matrix(X, self.n_features_in_)
        if method == "entropy":
            probs = self.forest_.tree_probas_batch(X)
            values = np.array([entropy_uncertainty(row) for row in probs])
            return {"total": values[:, 0], "aleatoric": values[:, 1],
                    "epistemic": values[:, 2]}
        if method == "likelihood":
            if self.forest_.class_count != 2:
                raise UnsupportedTaskError(
                    "likelihood-based uncertainty requires a binary task, "
                    f"got {self.forest_.class_count} classes")
            counts = self.forest_.leaf_counts_batch(X)
            flat = rl_uncertainty_batch(counts.reshape(-1, 2), tol)
            per_tree = flat.reshape(X.shape[0], self.forest_.n_trees, 2)
            mean = per_tree.mean(axis=1)
            return {"epistemic": mean[:, 0], "aleatoric": mean[:, 1]}
        raise ValueError(f"unknown method {method!r}, expected 'entropy' or 'likelihood'")

    def save(self, path):
        """Persist the fitted forest as a versioned JSON document."""
        self._check_fitted()
        forest_mod.save_forest(self.forest_, path)

    @classmethod
    def load(cls, path):
        """Rebuild a fitted classifier from :meth:`save` output."""
        forest = forest_mod.load_forest(path)
        est = cls(n_trees=forest.config.n_trees, max_depth=forest.config.max_depth,
                  min_samples_split=forest.config.min_samples_split,
                  random_state=forest.config.seed)
        est.forest_ = forest
        names = forest.label_names if forest.label_names is not None \
            else list(range(forest.class_count))
        est.classes_ = np.asarray(names)
        est.n_features_in_ = forest.n_features
        return est
