"""Accuracy-rejection evaluation of uncertainty estimates.

An accuracy-rejection curve reports the accuracy of a classifier that refuses
to predict on the fraction of test instances it is least certain about, as a
function of that fraction. A useful uncertainty measure yields a rising
curve; rejecting uniformly at random yields a flat one, which serves as the
baseline. The experiment runner repeats split/fit/score cycles with derived
seeds and aggregates the curves pointwise.
"""

import csv
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .dataset import train_test_split
from .entropy import entropy_uncertainty
from .forest import derive_seed, fit_forest, with_seed
from .likelihood import DEFAULT_TOL, UnsupportedTaskError, rl_uncertainty_batch

ENTROPY_CRITERIA = ("au_ent", "eu_ent", "tu_ent")
RL_CRITERIA = ("au_rl", "eu_rl")
CRITERIA = ENTROPY_CRITERIA + RL_CRITERIA + ("random",)
DEFAULT_CRITERIA = ("au_ent", "eu_ent", "au_rl", "eu_rl", "random")


@dataclass(frozen=True)
class ScoredPrediction:
    """One test instance with its prediction and uncertainty scores.

    ``au``/``eu``/``tu`` are aleatoric, epistemic, and total uncertainty;
    ``_ent`` values come from the ensemble entropy decomposition, ``_rl``
    values from the relative-likelihood supports (None unless binary).
    """

    index: int
    predicted: int
    actual: int
    tu_ent: float
    au_ent: float
    eu_ent: float
    au_rl: float = None
    eu_rl: float = None


@dataclass(frozen=True)
class AccuracyRejectionCurve:
    criterion: str
    fractions: np.ndarray
    accuracies: np.ndarray
    n_test: int


@dataclass(frozen=True)
class CurveSummary:
    """Pointwise mean and standard deviation of a criterion's curves."""

    fractions: np.ndarray
    mean_accuracy: np.ndarray
    std_accuracy: np.ndarray


@dataclass(frozen=True)
class ExperimentResult:
    curves: dict  # criterion -> CurveSummary, in canonical criterion order
    n_repetitions: int
    n_test: int
    step: float


def score_test_set(forest, test, tol=DEFAULT_TOL):
    """Score every test instance with prediction plus uncertainty columns."""
    if test.n_features != forest.n_features:
        raise ValueError(f"test data has {test.n_features} features, "
                         f"model expects {forest.n_features}")
    if test.class_count != forest.class_count:
        raise ValueError(f"test data has {test.class_count} classes, "
                         f"model expects {forest.class_count}")
    if test.n_rows == 0:
        return []
    counts = forest.leaf_counts_batch(test.features)              # (n, M, K)
    totals = counts.sum(axis=2, keepdims=True)
    probs = (counts + 1.0) / (totals + forest.class_count)
    predicted = np.argmax(probs.mean(axis=1), axis=1)

    rl = None
    if forest.class_count == 2:
        flat = rl_uncertainty_batch(counts.reshape(-1, 2), tol)
        rl = flat.reshape(test.n_rows, forest.n_trees, 2).mean(axis=1)

    records = []
    for i in range(test.n_rows):
        total, aleatoric, epistemic = entropy_uncertainty(probs[i])
        records.append(ScoredPrediction(
            index=i,
            predicted=int(predicted[i]),
            actual=int(test.labels[i]),
            tu_ent=total,
            au_ent=aleatoric,
            eu_ent=epistemic,
            au_rl=float(rl[i, 1]) if rl is not None else None,
            eu_rl=float(rl[i, 0]) if rl is not None else None,
        ))
    return records


def _rejection_order(records, criterion, seed):
    n = len(records)
    indices = np.array([r.index for r in records])
    if criterion == "random":
        rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))
        return rng.permutation(n)
    values = [getattr(r, criterion) for r in records]
    if any(v is None for v in values):
        raise UnsupportedTaskError(
            f"criterion {criterion!r} is unavailable for these records "
            "(relative-likelihood scores need a binary task)")
    values = np.asarray(values, dtype=np.float64)
    if not np.all(np.isfinite(values)):
        raise ValueError(f"criterion {criterion!r} contains non-finite values")
    # Most uncertain first; exact ties fall back to ascending instance index.
    return np.lexsort((indices, -values))


def accuracy_rejection_curve(records, criterion, step=0.02, seed=0):
    """Accuracy over retained instances as the most-uncertain ones are rejected.

    Rejection fractions run over {0, step, 2*step, ...} below 1; at fraction r
    the floor(r * n) highest-ranked records are dropped. The "random"
    criterion ranks by a seeded permutation instead of an uncertainty column.
    """
    if not records:
        raise ValueError("records must be non-empty")
    if criterion not in CRITERIA:
        raise ValueError(f"unknown criterion {criterion!r}, expected one of {CRITERIA}")
    if not 0.0 < step < 1.0:
        raise ValueError(f"step must be in (0, 1), got {step}")
    n = len(records)
    order = _rejection_order(records, criterion, seed)
    correct = np.array([r.predicted == r.actual for r in records], dtype=np.float64)[order]
    remaining = np.cumsum(correct[::-1])[::-1]  # suffix sums of correct counts

    fractions, accuracies = [], []
    i = 0
    while True:
        r = i * step
        if r >= 1.0 - 1e-9:
            break
        k = int(math.floor(r * n + 1e-9))  # guard against 0.3*10 == 2.999...
        fractions.append(r)
        accuracies.append(remaining[k] / (n - k))
        i += 1
    return AccuracyRejectionCurve(criterion, np.asarray(fractions),
                                  np.asarray(accuracies), n)


def _validate_criteria(criteria, class_count):
    if criteria is None:
        criteria = DEFAULT_CRITERIA if class_count == 2 else ("au_ent", "eu_ent", "random")
    criteria = tuple(criteria)
    for criterion in criteria:
        if criterion not in CRITERIA:
            raise ValueError(f"unknown criterion {criterion!r}, expected one of {CRITERIA}")
        if criterion in RL_CRITERIA and class_count != 2:
            raise UnsupportedTaskError(
                f"criterion {criterion!r} requires a binary dataset, "
                f"got {class_count} classes")
    # canonical order keeps outputs deterministic regardless of flag order
    return tuple(c for c in CRITERIA if c in criteria)


def _run_repetition(args):
    ds, config, rep, step, criteria, tol = args
    split_seed = derive_seed(config.seed, rep, 0)
    forest_seed = derive_seed(config.seed, rep, 1)
    baseline_seed = derive_seed(config.seed, rep, 2)
    pair = train_test_split(ds, config.train_fraction, split_seed, config.stratify)
    forest = fit_forest(pair.train, with_seed(config, forest_seed))
    records = score_test_set(forest, pair.test, tol)
    return {criterion: accuracy_rejection_curve(records, criterion, step, baseline_seed)
            for criterion in criteria}


def run_experiment(ds, config, repetitions=100, step=0.02, criteria=None,
                   tol=DEFAULT_TOL, n_jobs=1):
    """Repeated split/fit/score cycles, aggregated into per-criterion curves.

    Every repetition derives its own split, forest, and baseline seeds from
    ``(config.seed, repetition_index)``, so results are reproducible and
    independent of execution order; ``n_jobs > 1`` runs repetitions in
    separate processes.
    """
    if repetitions < 1:
        raise ValueError(f"repetitions must be >= 1, got {repetitions}")
    criteria = _validate_criteria(criteria, ds.class_count)
    jobs = [(ds, config, rep, step, criteria, tol) for rep in range(repetitions)]
    if n_jobs > 1:
        with ProcessPoolExecutor(max_workers=n_jobs) as pool:
            per_rep = list(pool.map(_run_repetition, jobs))
    else:
        per_rep = [_run_repetition(job) for job in jobs]

    curves = {}
    for criterion in criteria:
        stack = np.vstack([rep[criterion].accuracies for rep in per_rep])
        curves[criterion] = CurveSummary(per_rep[0][criterion].fractions,
                                         stack.mean(axis=0), stack.std(axis=0, ddof=0))
    return ExperimentResult(curves, repetitions, per_rep[0][criteria[0]].n_test, step)


def write_curves_csv(result, path):
    """Curve summaries as CSV rows, one per (criterion, rejection fraction)."""
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["criterion", "rejection_fraction", "mean_accuracy",
                         "std_accuracy", "n_repetitions"])
        for criterion, summary in result.curves.items():
            for r, mean, std in zip(summary.fractions, summary.mean_accuracy,
                                    summary.std_accuracy):
                writer.writerow([criterion, repr(float(r)), repr(float(mean)),
                                 repr(float(std)), result.n_repetitions])
