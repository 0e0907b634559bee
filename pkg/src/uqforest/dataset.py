"""Tabular classification datasets: CSV loading, validation, and train/test splitting."""

import csv
import warnings
from dataclasses import dataclass, field

import numpy as np

from .validation import check_feature_matrix, check_labels

_RNG_BITS = np.random.Philox


def _generator(seed_seq):
    return np.random.Generator(_RNG_BITS(seed_seq))


@dataclass(frozen=True)
class Dataset:
    """An immutable numeric feature matrix with dense integer class labels.

    ``labels[i]`` is a class index in ``[0, class_count)``; ``label_names`` maps
    each index back to the original label value in first-appearance order.
    """

    features: np.ndarray
    labels: np.ndarray
    class_count: int
    label_names: list = None
    feature_names: list = None

    def __post_init__(self):
        X = check_feature_matrix(self.features, name="features")
        if self.class_count < 1:
            raise ValueError(f"class_count must be >= 1, got {self.class_count}")
        y = check_labels(self.labels, X.shape[0], self.class_count)
        X.flags.writeable = False
        y.flags.writeable = False
        object.__setattr__(self, "features", X)
        object.__setattr__(self, "labels", y)
        if self.feature_names is not None and len(self.feature_names) != X.shape[1]:
            raise ValueError("feature_names length does not match feature count")
        if self.label_names is not None and len(self.label_names) != self.class_count:
            raise ValueError("label_names length does not match class_count")

    @property
    def n_rows(self):
        return self.features.shape[0]

    @property
    def n_features(self):
        return self.features.shape[1]

    def take(self, indices):
        """Row subset as a new Dataset (class mapping is preserved)."""
        indices = np.asarray(indices, dtype=np.intp)
        return Dataset(self.features[indices], self.labels[indices], self.class_count,
                       self.label_names, self.feature_names)


@dataclass(frozen=True)
class SplitPair:
    """A disjoint train/test partition of a source dataset."""

    train: Dataset
    test: Dataset
    seed: int
    train_indices: np.ndarray = field(repr=False, default=None)
    test_indices: np.ndarray = field(repr=False, default=None)


def dense_labels(raw_labels):
    """Map raw label values to dense indices 0..K-1 in first-appearance order.

    Returns (codes, names) where ``names[k]`` is the original value of class k.
    """
    names = []
    index = {}
    codes = np.empty(len(raw_labels), dtype=np.int64)
    for i, value in enumerate(raw_labels):
        if isinstance(value, np.generic):
            value = value.item()
        if value not in index:
            index[value] = len(names)
            names.append(value)
        codes[i] = index[value]
    return codes, names


def _is_numeric(cell):
    try:
        float(cell)
        return True
    except ValueError:
        return False


def load_csv(path, label_column=None):
    """Load a classification dataset from a CSV file.

    The label column may be given by header name or by (possibly negative)
    integer index; the default is the last column. A header row is detected
    when any feature cell of the first row fails to parse as a number; naming
    the label column requires a header.
    """
    with open(path, newline="", encoding="utf-8") as handle:
        rows = [row for row in csv.reader(handle) if row]
    if not rows:
        raise ValueError(f"{path}: empty dataset")
    arity = len(rows[0])
    for i, row in enumerate(rows):
        if len(row) != arity:
            raise ValueError(f"{path}: row {i} has {len(row)} cells, expected {arity}")
    if arity < 2:
        raise ValueError(f"{path}: need at least one feature column and one label column")

    if label_column is None:
        label_idx = arity - 1
    elif isinstance(label_column, int) or (isinstance(label_column, str)
                                           and label_column.lstrip("-").isdigit()):
        label_idx = int(label_column)
        if not -arity <= label_idx < arity:
            raise ValueError(f"{path}: label column index {label_idx} out of range for "
                             f"{arity} columns")
        label_idx %= arity
    else:
        if label_column not in rows[0]:
            raise ValueError(f"{path}: label column {label_column!r} not found in header")
        label_idx = rows[0].index(label_column)

    feature_cols = [j for j in range(arity) if j != label_idx]
    # Header detection looks at feature cells only: label values are allowed to
    # be arbitrary strings in data rows.
    has_header = any(not _is_numeric(rows[0][j]) for j in feature_cols)
    if isinstance(label_column, str) and not label_column.lstrip("-").isdigit():
        has_header = True

    header = rows[0] if has_header else None
    data = rows[1:] if has_header else rows
    if not data:
        raise ValueError(f"{path}: empty dataset (header only)")

    features = np.empty((len(data), len(feature_cols)), dtype=np.float64)
    raw_labels = []
    for i, row in enumerate(data):
        for k, j in enumerate(feature_cols):
            try:
                features[i, k] = float(row[j])
            except ValueError:
                raise ValueError(f"{path}: non-numeric feature cell {row[j]!r} "
                                 f"at row {i}, column {j}") from None
        raw_labels.append(row[label_idx])

    codes, names = dense_labels(raw_labels)
    if len(names) < 2:
        warnings.warn(f"{path}: dataset contains a single class ({names[0]!r})",
                      UserWarning, stacklevel=2)
    feature_names = [header[j] for j in feature_cols] if header else None
    return Dataset(features, codes, max(len(names), 1), names, feature_names)


def read_feature_csv(path, n_features):
    """Read a feature-only query CSV (optional header) as an (n, D) matrix."""
    with open(path, newline="", encoding="utf-8") as handle:
        rows = [row for row in csv.reader(handle) if row]
    if not rows:
        raise ValueError(f"{path}: empty query file")
    if any(not _is_numeric(cell) for cell in rows[0]):
        rows = rows[1:]
        if not rows:
            raise ValueError(f"{path}: empty query file (header only)")
    for i, row in enumerate(rows):
        if len(row) != n_features:
            raise ValueError(f"{path}: row {i} has {len(row)} features, expected {n_features}")
    try:
        X = np.array([[float(cell) for cell in row] for row in rows], dtype=np.float64)
    except ValueError:
        raise ValueError(f"{path}: non-numeric feature cell") from None
    return check_feature_matrix(X, n_features, name=path)


def write_csv(ds, path):
    """Write a Dataset back to CSV with a header and original label values."""
    names = ds.feature_names or [f"x{j}" for j in range(ds.n_features)]
    labels = ds.label_names or list(range(ds.class_count))
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(list(names) + ["label"])
        for i in range(ds.n_rows):
            writer.writerow([repr(v) for v in ds.features[i]] + [labels[ds.labels[i]]])


def train_test_split(ds, train_fraction=0.7, seed=0, stratify=False):
    """Randomly partition a dataset into train and test subsets.

    Deterministic for a given seed: a seeded permutation followed by a prefix
    split of round(train_fraction * N) rows (per class when ``stratify`` is set).
    """
    if not 0.0 < train_fraction < 1.0:
        raise ValueError(f"train_fraction must be in (0, 1), got {train_fraction}")
    n = ds.n_rows
    if n < 2:
        raise ValueError(f"cannot split a dataset with {n} row(s)")
    rng = _generator(np.random.SeedSequence(seed))
    if stratify:
        train_idx, test_idx = [], []
        for c in range(ds.class_count):
            class_idx = np.flatnonzero(ds.labels == c)
            perm = class_idx[rng.permutation(class_idx.size)]
            cut = int(np.floor(train_fraction * class_idx.size + 0.5))
            train_idx.append(perm[:cut])
            test_idx.append(perm[cut:])
        train_idx = np.concatenate(train_idx)
        test_idx = np.concatenate(test_idx)
    else:
        perm = rng.permutation(n)
        cut = int(np.floor(train_fraction * n + 0.5))
        train_idx, test_idx = perm[:cut], perm[cut:]
    if train_idx.size == 0 or test_idx.size == 0:
        raise ValueError(f"split of {n} rows at fraction {train_fraction} leaves an "
                         "empty train or test side")
    return SplitPair(ds.take(train_idx), ds.take(test_idx), seed, train_idx, test_idx)


def make_overlap_gaussians(n_samples=1000, label_noise=0.2, seed=0):
    """Synthetic binary dataset: two unit-variance 2-D Gaussians centered at
    (-1, 0) and (+1, 0), with labels flipped at rate ``label_noise`` inside the
    overlap strip between the centers."""
    if n_samples < 2:
        raise ValueError("n_samples must be >= 2")
    rng = _generator(np.random.SeedSequence(seed))
    half = n_samples // 2
    sizes = (half, n_samples - half)
    X = np.vstack([rng.normal(loc=(-1.0, 0.0), scale=1.0, size=(sizes[0], 2)),
                   rng.normal(loc=(+1.0, 0.0), scale=1.0, size=(sizes[1], 2))])
    y = np.repeat([0, 1], sizes).astype(np.int64)
    in_overlap = np.abs(X[:, 0]) < 1.0
    flip = in_overlap & (rng.random(n_samples) < label_noise)
    y[flip] = 1 - y[flip]
    return Dataset(X, y, 2, [0, 1], ["x0", "x1"])
