"""Command-line interface: train, uncertainty, experiment, rl-table.

All randomness flows from --seed, so every subcommand is deterministic given
its flags. The output directory defaults to $UQFOREST_OUT_DIR and the worker
count for experiments to $UQFOREST_JOBS; explicit flags win over both.
"""

import argparse
import csv
import os
import sys

import numpy as np

from .dataset import load_csv, read_feature_csv
from .entropy import entropy_uncertainty
from .evaluate import CRITERIA, run_experiment, write_curves_csv
from .forest import ForestConfig, fit_forest, load_forest, save_forest
from .likelihood import DEFAULT_TOL, build_uncertainty_table, rl_uncertainty_batch, \
    support_degrees


def _out_dir(args):
    path = args.out_dir or os.environ.get("UQFOREST_OUT_DIR") or "."
    os.makedirs(path, exist_ok=True)
    return path


def _out_path(args, default_name):
    if args.out:
        return args.out
    return os.path.join(_out_dir(args), default_name)


def _forest_config(args):
    return ForestConfig(n_trees=args.trees, max_depth=args.max_depth,
                        min_samples_split=args.min_samples_split,
                        train_fraction=getattr(args, "train_fraction", 0.7),
                        stratify=getattr(args, "stratify", False),
                        seed=args.seed)


def cmd_train(args):
    ds = load_csv(args.data, args.label_col)
    forest = fit_forest(ds, _forest_config(args))
    out = _out_path(args, "model.json")
    save_forest(forest, out)
    depths = [tree.depth for tree in forest.trees]
    print(f"trained on {ds.n_rows} rows, {ds.n_features} features, "
          f"{ds.class_count} classes")
    print(f"forest: {forest.n_trees} trees, depth min/mean/max = "
          f"{min(depths)}/{sum(depths) / len(depths):.2f}/{max(depths)}")
    print(f"model written to {out}")
    return 0


def cmd_uncertainty(args):
    forest = load_forest(args.model)
    X = read_feature_csv(args.data, forest.n_features)
    probs = forest.tree_probas_batch(X)
    predicted = np.argmax(probs.mean(axis=1), axis=1)
    labels = forest.label_names if forest.label_names is not None \
        else list(range(forest.class_count))

    rl = None
    if forest.class_count == 2:
        counts = forest.leaf_counts_batch(X)
        flat = rl_uncertainty_batch(counts.reshape(-1, 2), args.tol)
        rl = flat.reshape(X.shape[0], forest.n_trees, 2).mean(axis=1)

    out = _out_path(args, "uncertainty.csv")
    with open(out, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["index", "prediction", "au_ent", "eu_ent", "tu_ent",
                         "au_rl", "eu_rl"])
        for i in range(X.shape[0]):
            total, aleatoric, epistemic = entropy_uncertainty(probs[i])
            row = [i, labels[predicted[i]], repr(aleatoric), repr(epistemic),
                   repr(total)]
            if rl is not None:
                row += [repr(float(rl[i, 1])), repr(float(rl[i, 0]))]
            else:
                row += ["", ""]
            writer.writerow(row)
    print(f"scored {X.shape[0]} rows -> {out}")
    return 0


def _plot_curves(result, out_dir):
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    baseline = result.curves.get("random")
    for criterion, summary in result.curves.items():
        if criterion == "random":
            continue
        fig, ax = plt.subplots(figsize=(5, 3.5))
        ax.plot(summary.fractions, summary.mean_accuracy, label=criterion)
        ax.fill_between(summary.fractions,
                        summary.mean_accuracy - summary.std_accuracy,
                        summary.mean_accuracy + summary.std_accuracy, alpha=0.2)
        if baseline is not None:
            ax.plot(baseline.fractions, baseline.mean_accuracy, "--",
                    color="gray", label="random")
        ax.set_xlabel("rejection fraction")
        ax.set_ylabel("accuracy")
        ax.legend()
        fig.tight_layout()
        path = os.path.join(out_dir, f"arc_{criterion}.svg")
        fig.savefig(path, format="svg", metadata={"Date": None})
        plt.close(fig)
        print(f"plot written to {path}")


def cmd_experiment(args):
    ds = load_csv(args.data, args.label_col)
    jobs = args.jobs or int(os.environ.get("UQFOREST_JOBS", "1"))
    result = run_experiment(ds, _forest_config(args), repetitions=args.reps,
                            step=args.step, criteria=args.criteria, tol=args.tol,
                            n_jobs=jobs)
    out = _out_path(args, "curves.csv")
    write_curves_csv(result, out)
    print(f"{result.n_repetitions} repetitions on {ds.n_rows} rows "
          f"({result.n_test} test) -> {out}")
    if args.plot:
        _plot_curves(result, _out_dir(args))
    return 0


def cmd_rl_table(args):
    table = build_uncertainty_table(args.max_total, args.tol)
    out = _out_path(args, "rl_table.csv")
    with open(out, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["n", "p", "pi_pos", "pi_neg", "u_e", "u_a"])
        for total in range(args.max_total + 1):
            for pos in range(total + 1):
                neg = total - pos
                supports = support_degrees((pos, neg), args.tol)
                value = table[(pos, neg)]
                writer.writerow([pos, neg, repr(supports.pi_pos), repr(supports.pi_neg),
                                 repr(value.epistemic), repr(value.aleatoric)])
    print(f"{len(table)} entries -> {out}")
    return 0


def _add_common(parser):
    parser.add_argument("--out", help="output file path")
    parser.add_argument("--out-dir", help="output directory (default $UQFOREST_OUT_DIR or .)")


def _add_forest_flags(parser):
    parser.add_argument("--trees", type=int, default=50, help="ensemble size")
    parser.add_argument("--max-depth", type=int, default=10, help="tree depth cap")
    parser.add_argument("--min-samples-split", type=int, default=2)
    parser.add_argument("--seed", type=int, default=0)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="uqforest",
        description="Random forests with aleatoric/epistemic uncertainty estimates.")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    train = sub.add_parser("train", help="fit a forest on a CSV and save it as JSON")
    train.add_argument("--data", required=True, help="training CSV")
    train.add_argument("--label-col", help="label column name or index (default: last)")
    _add_forest_flags(train)
    _add_common(train)
    train.set_defaults(func=cmd_train)

    unc = sub.add_parser("uncertainty", help="score a query CSV with a saved model")
    unc.add_argument("--model", required=True, help="model JSON from train")
    unc.add_argument("--data", required=True, help="query CSV (features only)")
    unc.add_argument("--tol", type=float, default=DEFAULT_TOL)
    _add_common(unc)
    unc.set_defaults(func=cmd_uncertainty)

    exp = sub.add_parser("experiment",
                         help="repeated-split accuracy-rejection experiment")
    exp.add_argument("--data", required=True, help="dataset CSV")
    exp.add_argument("--label-col", help="label column name or index (default: last)")
    exp.add_argument("--reps", type=int, default=100, help="number of repetitions")
    exp.add_argument("--step", type=float, default=0.02, help="rejection-grid step")
    exp.add_argument("--train-fraction", type=float, default=0.7)
    exp.add_argument("--stratify", action="store_true",
                     help="stratify the train/test splits by class")
    exp.add_argument("--criteria", nargs="+", choices=CRITERIA,
                     help="criteria to evaluate (default: all applicable)")
    exp.add_argument("--tol", type=float, default=DEFAULT_TOL)
    exp.add_argument("--jobs", type=int,
                     help="parallel repetition workers (default $UQFOREST_JOBS or 1)")
    exp.add_argument("--plot", action="store_true", help="emit one SVG per criterion")
    _add_forest_flags(exp)
    _add_common(exp)
    exp.set_defaults(func=cmd_experiment)

    table = sub.add_parser("rl-table",
                           help="dump the per-leaf likelihood uncertainty table")
    table.add_argument("--max-total", type=int, required=True,
                       help="largest leaf size n+p to tabulate")
    table.add_argument("--tol", type=float, default=DEFAULT_TOL)
    _add_common(table)
    table.set_defaults(func=cmd_rl_table)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
