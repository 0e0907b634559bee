"""Ensemble entropy decomposition of predictive uncertainty.

Given the M class distributions an ensemble produces for one query, the total
uncertainty is the Shannon entropy of their component-wise mean, the aleatoric
part is the mean of the member entropies, and the epistemic part is the
difference:

    total      =  H( mean_i p_i )
    aleatoric  =  mean_i H( p_i )
    epistemic  =  total - aleatoric

All entropies use log base 2, so values are in bits and bounded by log2(K).
Jensen's inequality on the concave entropy makes the epistemic part
non-negative up to floating-point rounding; it is zero exactly when all
members agree.
"""

from typing import NamedTuple

import numpy as np

from .validation import check_distribution


class EntropyUncertainty(NamedTuple):
    """Per-query uncertainty in bits: ``total = aleatoric + epistemic``."""

    total: float
    aleatoric: float
    epistemic: float


def shannon_entropy(dist):
    """Shannon entropy of one class distribution in bits, with 0*log2(0) := 0."""
    probs = check_distribution(dist)
    positive = probs[probs > 0.0]
    return float(-np.sum(positive * np.log2(positive)))


def _as_members(dists):
    members = np.asarray(dists, dtype=np.float64)
    if members.ndim != 2 or members.shape[0] < 1:
        raise ValueError("expected a non-empty list of class distributions")
    for row in members:
        check_distribution(row)
    return members


def aleatoric_entropy(dists):
    """Mean member entropy of an (M, K) stack of class distributions, in bits."""
    members = _as_members(dists)
    return float(np.mean([shannon_entropy(row) for row in members]))


def total_entropy(dists):
    """Entropy of the component-wise mean of an (M, K) stack, in bits."""
    members = _as_members(dists)
    return shannon_entropy(members.mean(axis=0))


def entropy_uncertainty(dists):
    """Total, aleatoric, and epistemic uncertainty of an ensemble prediction.

    The epistemic value is the exact difference ``total - aleatoric``, clamped
    to zero only when it is within 1e-12 below zero (rounding noise).
    """
    members = _as_members(dists)
    total = total_entropy(members)
    aleatoric = aleatoric_entropy(members)
    epistemic = total - aleatoric
    if -1e-12 <= epistemic < 0.0:
        epistemic = 0.0
    return EntropyUncertainty(total, aleatoric, epistemic)
