"""Relative-likelihood support degrees and uncertainty for binary leaves.

A leaf region with ``pos`` positive and ``neg`` negative training instances
induces the hypothesis space of constant predictors theta in [0, 1], where
theta is the probability of the positive class. The relative likelihood

    rel(theta) = theta^pos * (1 - theta)^neg / max over theta' of the same

is a plausibility in [0, 1], maximal at theta_ml = pos / (pos + neg). The
degree of support of the positive class is

    pi_pos = sup over theta of min( rel(theta), 2*theta - 1 )

and pi_neg is the mirror image with 1 - 2*theta. Epistemic uncertainty is the
smaller support (both classes still plausible), aleatoric uncertainty is one
minus the larger support (no class strongly supported):

    u_e = min(pi_pos, pi_neg)        u_a = 1 - max(pi_pos, pi_neg)

The supremum sits where the decreasing branch of rel meets the rising margin
line, so the solver brackets that unique crossing on a 1001-point grid and
refines it by bisection; the binomial coefficient of the likelihood cancels in
the normalization and all likelihood arithmetic is done in log space.
Uncertainties depend only on the pair of counts, so results are memoized in a
lock-protected table shared across forests.
"""

import math
import threading
from typing import NamedTuple

import numpy as np

from .validation import check_feature_vector

GRID_POINTS = 1001
DEFAULT_TOL = 1e-9


class UnsupportedTaskError(ValueError):
    """The relative-likelihood measures are defined for binary classification only."""


class LeafCounts(NamedTuple):
    """Positive and negative training counts of one leaf region."""

    pos: int
    neg: int


class SupportDegrees(NamedTuple):
    """Plausibility that some credible hypothesis favors each class."""

    pi_pos: float
    pi_neg: float


class RLUncertainty(NamedTuple):
    """Epistemic and aleatoric uncertainty derived from the support degrees."""

    epistemic: float
    aleatoric: float


def _as_counts(counts):
    pos, neg = counts
    pos, neg = int(pos), int(neg)
    if pos < 0 or neg < 0:
        raise ValueError(f"counts must be non-negative, got ({pos}, {neg})")
    return LeafCounts(pos, neg)


def _log_max_likelihood(pos, neg):
    """log of theta^pos (1-theta)^neg at theta_ml, with the 0^0 := 1 convention."""
    total = pos + neg
    out = 0.0
    if pos:
        out += pos * math.log(pos / total)
    if neg:
        out += neg * math.log(neg / total)
    return out


def normalized_likelihood(theta, counts):
    """Likelihood of ``theta`` relative to the maximum-likelihood estimate.

    Identically 1 for an empty region; conventions 0*log(0) = 0 and 0^0 = 1.
    """
    if not 0.0 <= theta <= 1.0:
        raise ValueError(f"theta must be in [0, 1], got {theta}")
    pos, neg = _as_counts(counts)
    if pos + neg == 0:
        return 1.0
    if theta == 0.0:
        return 1.0 if pos == 0 else 0.0
    if theta == 1.0:
        return 1.0 if neg == 0 else 0.0
    log_lik = pos * math.log(theta) + neg * math.log1p(-theta)
    return math.exp(log_lik - _log_max_likelihood(pos, neg))


def _support_pos(pos, neg, tol):
    """sup over theta of min(rel(theta), 2*theta - 1), solved to ``tol`` in theta.

    With no negative evidence the relative likelihood stays 1 up to theta = 1,
    where the margin term also reaches 1. Otherwise the difference
    d(theta) = rel(theta) - (2*theta - 1) is non-negative at theta_ml and
    strictly decreasing on [theta_ml, 1] (rel falls, the line rises), so its
    unique root there carries the supremum.
    """
    if neg == 0:
        return 1.0
    theta_ml = pos / (pos + neg)
    log_den = _log_max_likelihood(pos, neg)

    def diff(theta):
        if theta >= 1.0:
            return -1.0
        log_lik = (pos * math.log(theta) if pos else 0.0) + neg * math.log1p(-theta)
        return math.exp(log_lik - log_den) - (2.0 * theta - 1.0)

    grid = np.linspace(0.0, 1.0, GRID_POINTS)
    grid = grid[grid > theta_ml]
    with np.errstate(divide="ignore"):
        log_lik = neg * np.log1p(-grid)
        if pos:
            log_lik += pos * np.log(grid)
    d = np.exp(log_lik - log_den) - (2.0 * grid - 1.0)

    negative = np.flatnonzero(d < 0.0)
    if negative.size == 0:
        return 1.0  # root is the endpoint theta = 1 itself
    k = negative[0]
    lo = theta_ml if k == 0 else float(grid[k - 1])
    hi = float(grid[k])
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if diff(mid) >= 0.0:
            lo = mid
        else:
            hi = mid
    value = 2.0 * (0.5 * (lo + hi)) - 1.0
    return min(max(value, 0.0), 1.0)


def support_degrees(counts, tol=DEFAULT_TOL):
    """Degrees of support of the positive and the negative class.

    The negative-class problem is the positive-class problem with the counts
    swapped (substitute theta -> 1 - theta), so both sides share one solver
    and class symmetry is exact.
    """
    if tol <= 0.0:
        raise ValueError(f"tol must be positive, got {tol}")
    pos, neg = _as_counts(counts)
    return SupportDegrees(_support_pos(pos, neg, tol), _support_pos(neg, pos, tol))


def rl_uncertainty(counts, tol=DEFAULT_TOL):
    """Epistemic and aleatoric uncertainty of one leaf's counts."""
    pi_pos, pi_neg = support_degrees(counts, tol)
    return RLUncertainty(min(pi_pos, pi_neg), 1.0 - max(pi_pos, pi_neg))


_cache = {}
_cache_lock = threading.Lock()


def _rl_uncertainty_cached(pos, neg, tol):
    key = (pos, neg, tol)
    with _cache_lock:
        hit = _cache.get(key)
    if hit is not None:
        return hit
    value = rl_uncertainty(LeafCounts(pos, neg), tol)
    with _cache_lock:
        _cache[key] = value
        # symmetry: swapped counts swap the supports, leaving (u_e, u_a) fixed
        _cache[(neg, pos, tol)] = value
    return value


def build_uncertainty_table(max_total, tol=DEFAULT_TOL):
    """Uncertainties for every count pair with ``pos + neg <= max_total``."""
    if max_total < 0:
        raise ValueError(f"max_total must be >= 0, got {max_total}")
    table = {}
    for total in range(max_total + 1):
        for pos in range(total + 1):
            table[(pos, total - pos)] = _rl_uncertainty_cached(pos, total - pos, tol)
    return table


def rl_uncertainty_batch(class_counts, tol=DEFAULT_TOL):
    """Uncertainties for an (m, 2) array of leaf class-count vectors.

    Column 1 of ``class_counts`` is the positive class (class index 1).
    Returns an (m, 2) float array with columns (epistemic, aleatoric); each
    distinct count pair is solved once and memoized.
    """
    class_counts = np.asarray(class_counts, dtype=np.int64)
    if class_counts.ndim != 2 or class_counts.shape[1] != 2:
        raise UnsupportedTaskError(
            f"relative-likelihood uncertainty needs binary class counts, "
            f"got shape {class_counts.shape}")
    pairs, inverse = np.unique(class_counts, axis=0, return_inverse=True)
    values = np.empty((pairs.shape[0], 2), dtype=np.float64)
    for i, (neg, pos) in enumerate(pairs):
        values[i] = _rl_uncertainty_cached(int(pos), int(neg), tol)
    return values[inverse]


def forest_rl_uncertainty(forest, x, tol=DEFAULT_TOL):
    """Tree-averaged relative-likelihood uncertainty of one query.

    Reads each tree's leaf counts at ``x``, maps them to (epistemic,
    aleatoric) pairs via the memoized table, and averages across the forest.
    """
    if forest.class_count != 2:
        raise UnsupportedTaskError(
            f"relative-likelihood uncertainty requires a binary forest, "
            f"got {forest.class_count} classes")
    x = check_feature_vector(x, forest.n_features)
    counts = forest.leaf_counts_batch(x[None, :])[0]  # (M, 2)
    per_tree = rl_uncertainty_batch(counts, tol)
    return RLUncertainty(float(per_tree[:, 0].mean()), float(per_tree[:, 1].mean()))
