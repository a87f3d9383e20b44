"""Command-line entry points: dataset ingestion and synthesis, profile
export, the evaluation harness, the sparsity sweep, and the study server.

Every run embeds its seeds in the written artifacts, so re-running with an
identical configuration reproduces byte-identical reports. A JSON config file
(--config) supplies defaults; explicit flags override it.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .aggregation import Strategy, profiles_for, write_profiles_csv
from .augmentation import AugmentationSpec
from .classifier import GridSearchSpec, default_grid, full_grid
from .dataset import (
    Dataset,
    ParseError,
    SyntheticSchemeSpec,
    ValidationError,
    generate_synthetic,
    ingest,
    square_ratings,
)
from .evalharness import (
    VariantSpec,
    evaluate,
    make_fold_plan,
    paper_variants,
    sparsity_sweep,
    write_accuracy_csv,
    write_confusion_csv,
    write_report_json,
    write_sparsity_csv,
)

ALL_STRATEGIES = [s.value for s in Strategy]
DEFAULT_EVAL_STRATEGIES = ["AVE", "MULT", "LM", "SDS1", "SDS3", "COPE"]


def _load_config(path: str | None) -> dict:
    if not path:
        return {}
    with open(path, encoding="utf-8") as fh:
        config = json.load(fh)
    if not isinstance(config, dict):
        raise ValidationError("config file must hold a JSON object")
    return config


def _setting(args, config: dict, name: str, default):
    """Flag value if given, else the config file value, else the default."""
    value = getattr(args, name.replace("-", "_"), None)
    if value is not None:
        return value
    if name in config:
        return config[name]
    return default


def _load_dataset(args, config) -> Dataset:
    ratings = _setting(args, config, "ratings", None)
    groups = _setting(args, config, "groups", None)
    choices = _setting(args, config, "choices", None)
    for label, path in (("ratings", ratings), ("groups", groups), ("choices", choices)):
        if path is None:
            raise ValidationError(f"missing --{label} (or config key {label!r})")
        if not Path(path).exists():
            raise ValidationError(f"{label} file not found: {path}")
    dataset = ingest(ratings, groups, choices)
    if _setting(args, config, "square", False):
        dataset = dataset.with_ratings(square_ratings(dataset.ratings))
    return dataset


def _write_dataset_csvs(dataset: Dataset, out_dir: Path) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    with open(out_dir / "ratings.csv", "w", encoding="utf-8") as fh:
        fh.write("user_id,option_id,rating\n")
        values = dataset.ratings.values
        for u in range(dataset.n_users):
            for o in range(dataset.n_options):
                if not np.isnan(values[u, o]):
                    fh.write(f"u{u + 1},{o + 1},{float(values[u, o])!r}\n")
    with open(out_dir / "groups.csv", "w", encoding="utf-8") as fh:
        fh.write("group_id,user_id\n")
        for g in dataset.groups:
            for u in g.members:
                fh.write(f"{g.group_id},u{u + 1}\n")
    with open(out_dir / "choices.csv", "w", encoding="utf-8") as fh:
        fh.write("group_id,option_id\n")
        for g in dataset.groups:
            fh.write(f"{g.group_id},{dataset.choice(g.group_id) + 1}\n")


def _dataset_summary(dataset: Dataset, seeds: dict) -> dict:
    counts = np.zeros(dataset.n_options, dtype=int)
    for gid in dataset.choices:
        counts[dataset.choice(gid)] += 1
    return {
        "n_users": dataset.n_users,
        "n_options": dataset.n_options,
        "n_groups": dataset.n_groups,
        "n_known_ratings": dataset.ratings.n_known,
        "group_sizes": sorted(len(g) for g in dataset.groups),
        "choice_counts": [int(c) for c in counts],
        "seeds": seeds,
        "version": __version__,
    }


def _grid_from_args(args, config) -> GridSearchSpec:
    inner = int(_setting(args, config, "inner-folds", 3))
    if _setting(args, config, "paper-grid", False):
        return full_grid(inner)
    return default_grid(inner)


def cmd_ingest(args, config) -> int:
    dataset = _load_dataset(args, config)
    out = Path(_setting(args, config, "out", "dataset_summary.json"))
    out.parent.mkdir(parents=True, exist_ok=True)
    with open(out, "w", encoding="utf-8") as fh:
        json.dump(_dataset_summary(dataset, {}), fh, indent=2)
        fh.write("\n")
    print(
        f"ingested {dataset.n_users} users, {dataset.n_groups} groups, "
        f"{dataset.n_options} options -> {out}"
    )
    return 0


def cmd_synth(args, config) -> int:
    seed = int(_setting(args, config, "seed", 0))
    spec = SyntheticSchemeSpec(
        noise=float(_setting(args, config, "tau", 0.0)),
        top_k=int(_setting(args, config, "top-k", 3)),
        group_size_range=(
            int(_setting(args, config, "min-size", 2)),
            int(_setting(args, config, "max-size", 5)),
        ),
        rating_noise_scale=float(_setting(args, config, "noise-scale", 0.35)),
        seed=seed,
    )
    dataset = generate_synthetic(
        spec,
        n_groups=int(_setting(args, config, "n-groups", 200)),
        n_options=int(_setting(args, config, "n-options", 10)),
    )
    out_dir = Path(_setting(args, config, "out", "synthetic"))
    _write_dataset_csvs(dataset, out_dir)
    with open(out_dir / "dataset_summary.json", "w", encoding="utf-8") as fh:
        json.dump(_dataset_summary(dataset, {"generator": seed}), fh, indent=2)
        fh.write("\n")
    print(f"wrote synthetic dataset ({dataset.n_groups} groups) to {out_dir}/")
    return 0


def cmd_profiles(args, config) -> int:
    dataset = _load_dataset(args, config)
    token = str(_setting(args, config, "strategy", "all")).upper()
    strategies = ALL_STRATEGIES if token == "ALL" else [token]
    profiles = []
    for s in strategies:
        per_group = profiles_for(dataset, Strategy(s))
        profiles.extend(per_group[g.group_id] for g in dataset.groups)
    out = Path(_setting(args, config, "out", "profiles.csv"))
    out.parent.mkdir(parents=True, exist_ok=True)
    write_profiles_csv(profiles, out)
    print(f"wrote {len(profiles)} profiles to {out}")
    return 0


def _variants_from_args(args, config) -> list[VariantSpec]:
    strategies = _setting(args, config, "strategies", DEFAULT_EVAL_STRATEGIES)
    if isinstance(strategies, str):
        strategies = [s.strip() for s in strategies.split(",") if s.strip()]
    chosen = [Strategy(s.upper()) for s in strategies]
    which = str(_setting(args, config, "variants", "all"))
    variants = paper_variants(chosen)
    if which == "base":
        variants = [v for v in variants if v.augmentation == "none"]
    return variants


def _export_predictions(dataset, strategies, grid, seed, path) -> None:
    """Per-group predictions of the base variants: PACP straight from the
    profiles, LCP from a model fitted on the whole dataset (an inspection
    artifact, not an accuracy estimate)."""
    from .aggregation import labeled_groups
    from .prediction import lcp_predict, lcp_train, pacp_predict, write_predictions_csv

    rows = []
    for strategy in strategies:
        per_group = profiles_for(dataset, strategy)
        for i, g in enumerate(dataset.groups):
            prediction = pacp_predict(per_group[g.group_id], seed=seed + i)
            rows.append(
                (g.group_id, "PACP", strategy.value,
                 prediction.predicted_option, dataset.choice(g.group_id))
            )
        model = lcp_train(labeled_groups(dataset, strategy), grid, seed=seed)
        for g in dataset.groups:
            prediction = lcp_predict(model, per_group[g.group_id])
            rows.append(
                (g.group_id, "LCP", strategy.value,
                 prediction.predicted_option, dataset.choice(g.group_id))
            )
    path.parent.mkdir(parents=True, exist_ok=True)
    write_predictions_csv(rows, path)


def cmd_eval(args, config) -> int:
    dataset = _load_dataset(args, config)
    seed = int(_setting(args, config, "seed", 0))
    k = int(_setting(args, config, "k", 4))
    reps = int(_setting(args, config, "reps", 10))
    plan = make_fold_plan(dataset.groups, k, reps, seed)
    aug = AugmentationSpec(
        winners=True,
        n_permutations=int(_setting(args, config, "permutations", 1200)),
        seed=int(_setting(args, config, "aug-seed", seed)),
    )
    report = evaluate(
        dataset, _variants_from_args(args, config), plan, aug, _grid_from_args(args, config)
    )
    out = Path(_setting(args, config, "out", "report.json"))
    out.parent.mkdir(parents=True, exist_ok=True)
    write_report_json(report, out)
    predictions_path = _setting(args, config, "predictions", None)
    if predictions_path:
        strategies = sorted({v.spec.strategy for v in report.variants}, key=lambda s: s.value)
        _export_predictions(dataset, strategies, _grid_from_args(args, config), seed,
                            Path(predictions_path))
    plots = _setting(args, config, "plots", None)
    if plots:
        plots_dir = Path(plots)
        plots_dir.mkdir(parents=True, exist_ok=True)
        write_accuracy_csv(report, plots_dir / "accuracy.csv")
        for v in report.variants:
            write_confusion_csv(report, v.name, plots_dir / f"confusion_{v.name}.csv")
    for v in report.variants:
        print(f"{v.name}: accuracy {v.mean_accuracy:.3f}, KL {v.kl:.3f}")
    print(f"report -> {out}")
    return 0


def cmd_sparsity(args, config) -> int:
    dataset = _load_dataset(args, config)
    seed = int(_setting(args, config, "seed", 0))
    plan = make_fold_plan(
        dataset.groups,
        int(_setting(args, config, "k", 4)),
        int(_setting(args, config, "cv-reps", 10)),
        seed,
    )
    points = sparsity_sweep(
        dataset,
        Strategy(str(_setting(args, config, "strategy", "AVE")).upper()),
        p_max=float(_setting(args, config, "p-max", 0.6)),
        step=float(_setting(args, config, "step", 0.1)),
        draws=int(_setting(args, config, "draws", 5)),
        plan=plan,
        seed=seed,
        grid=_grid_from_args(args, config),
    )
    out = Path(_setting(args, config, "out", "sparsity.csv"))
    out.parent.mkdir(parents=True, exist_ok=True)
    write_sparsity_csv(points, out)
    metadata = {
        "seeds": {"plan": plan.seed, "sparsify": seed},
        "k": plan.n_folds,
        "cv_reps": plan.n_repetitions,
        "version": __version__,
        "points": [
            {
                "nominal_p": pt.nominal_p,
                "achieved_sparsity": pt.achieved_sparsity,
                "accuracies": dict(pt.accuracies),
            }
            for pt in points
        ],
    }
    with open(out.with_suffix(".json"), "w", encoding="utf-8") as fh:
        json.dump(metadata, fh, indent=2)
        fh.write("\n")
    for pt in points:
        accs = ", ".join(f"{n} {a:.3f}" for n, a in sorted(pt.accuracies.items()))
        print(f"p={pt.nominal_p:.2f} achieved={pt.achieved_sparsity:.3f}: {accs}")
    print(f"curve -> {out}")
    return 0


def cmd_serve(args, config) -> int:
    from .service import ReferenceAccuracies, serve

    dataset = _load_dataset(args, config)
    reference_path = _setting(args, config, "reference", None)
    reference = (
        ReferenceAccuracies.from_report_json(reference_path) if reference_path else None
    )
    serve(
        dataset,
        reference=reference,
        port=int(_setting(args, config, "port", 8000)),
        session_log=_setting(args, config, "session-log", None),
        seed=int(_setting(args, config, "seed", 0)),
        static_dir=_setting(args, config, "static", None),
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="groupchoice",
        description="Predict group choices from members' ratings.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config file with per-command defaults")
    common.add_argument("--seed", type=int, help="master seed for the run")
    common.add_argument("--out", help="output path (file or directory per command)")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_command(name, help_text):
        return sub.add_parser(name, parents=[common], help=help_text)

    def add_dataset_flags(p):
        p.add_argument("--ratings", help="ratings.csv path")
        p.add_argument("--groups", help="groups.csv path")
        p.add_argument("--choices", help="choices.csv path")
        p.add_argument(
            "--square", action="store_const", const=True,
            help="square the ratings before aggregation (published pipeline)",
        )

    p = add_command("ingest", "validate a dataset and write a summary")
    add_dataset_flags(p)

    p = add_command("synth", "generate a synthetic dataset as CSVs")
    p.add_argument("--n-groups", type=int)
    p.add_argument("--n-options", type=int)
    p.add_argument("--tau", type=float, help="probability of a non-argmax choice")
    p.add_argument("--top-k", type=int)
    p.add_argument("--min-size", type=int)
    p.add_argument("--max-size", type=int)
    p.add_argument("--noise-scale", type=float)

    p = add_command("profiles", "export group profiles as CSV")
    add_dataset_flags(p)
    p.add_argument("--strategy", help="AVE|MULT|LM|SDS1|SDS3|COPE|BORDA|MPL|all")

    p = add_command("eval", "run the cross-validation evaluation")
    add_dataset_flags(p)
    p.add_argument("--strategies", help="comma-separated strategy tokens")
    p.add_argument("--variants", choices=["all", "base"])
    p.add_argument("--k", type=int, help="number of folds")
    p.add_argument("--reps", type=int, help="number of repetitions")
    p.add_argument("--permutations", type=int, help="permutation profiles to add")
    p.add_argument("--aug-seed", type=int)
    p.add_argument("--inner-folds", type=int)
    p.add_argument(
        "--paper-grid", action="store_const", const=True,
        help="use the full 500-value C grid instead of the coarse default",
    )
    p.add_argument("--plots", help="directory for plot-ready CSVs")
    p.add_argument(
        "--predictions",
        help="also export per-group base-variant predictions to this CSV",
    )

    p = add_command("sparsity", "accuracy vs rating sparsity sweep")
    add_dataset_flags(p)
    p.add_argument("--strategy")
    p.add_argument("--p-max", type=float)
    p.add_argument("--step", type=float)
    p.add_argument("--draws", type=int, help="sparsified matrices per p")
    p.add_argument("--k", type=int)
    p.add_argument("--cv-reps", type=int)
    p.add_argument("--inner-folds", type=int)
    p.add_argument("--paper-grid", action="store_const", const=True)

    p = add_command("serve", "run the human-study HTTP service")
    add_dataset_flags(p)
    p.add_argument("--port", type=int)
    p.add_argument("--reference", help="report.json with LCP/PACP reference accuracies")
    p.add_argument("--session-log", help="append-only ndjson session log")
    p.add_argument("--static", help="directory of built UI assets to serve at /")

    return parser


COMMANDS = {
    "ingest": cmd_ingest,
    "synth": cmd_synth,
    "profiles": cmd_profiles,
    "eval": cmd_eval,
    "sparsity": cmd_sparsity,
    "serve": cmd_serve,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = _load_config(args.config)
        command_config = config.get(args.command, config)
        return COMMANDS[args.command](args, command_config)
    except (ParseError, ValidationError, ValueError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
