"""Random forest classification with per-prediction uncertainty estimates.

Two complementary measures are provided for every prediction: an ensemble
entropy decomposition (total = aleatoric + epistemic, in bits) and, for
binary tasks, relative-likelihood support degrees with their epistemic and
aleatoric components. Accuracy-rejection experiments compare either measure
against a random-rejection baseline.
"""

from .dataset import (Dataset, SplitPair, load_csv, make_overlap_gaussians,
                      train_test_split, write_csv)
from .entropy import (EntropyUncertainty, aleatoric_entropy, entropy_uncertainty,
                      shannon_entropy, total_entropy)
from .estimator import UncertaintyForestClassifier
from .evaluate import (AccuracyRejectionCurve, ExperimentResult, ScoredPrediction,
                       accuracy_rejection_curve, run_experiment, score_test_set,
                       write_curves_csv)
from .forest import (Forest, ForestConfig, fit_forest, load_forest, mean_proba,
                     predict, predict_proba_all, save_forest)
from .likelihood import (LeafCounts, RLUncertainty, SupportDegrees,
                         UnsupportedTaskError, build_uncertainty_table,
                         forest_rl_uncertainty, normalized_likelihood,
                         rl_uncertainty, support_degrees)
from .tree import DecisionTree, TreeConfig, fit_tree

__version__ = "0.1.0"

__all__ = [
    "Dataset", "SplitPair", "load_csv", "write_csv", "train_test_split",
    "make_overlap_gaussians",
    "TreeConfig", "DecisionTree", "fit_tree",
    "ForestConfig", "Forest", "fit_forest", "predict", "predict_proba_all",
    "mean_proba", "save_forest", "load_forest",
    "EntropyUncertainty", "shannon_entropy", "aleatoric_entropy", "total_entropy",
    "entropy_uncertainty",
    "LeafCounts", "SupportDegrees", "RLUncertainty", "UnsupportedTaskError",
    "normalized_likelihood", "support_degrees", "rl_uncertainty",
    "build_uncertainty_table", "forest_rl_uncertainty",
    "ScoredPrediction", "AccuracyRejectionCurve", "ExperimentResult",
    "score_test_set", "accuracy_rejection_curve", "run_experiment",
    "write_curves_csv",
    "UncertaintyForestClassifier",
]
