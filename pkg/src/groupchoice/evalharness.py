"""Reproducible evaluation: repeated k-fold cross-validation over a shared
fold plan, accuracy/confusion/KL metrics, Wilcoxon signed-rank significance,
and the rating-sparsity sweep.
"""
from __future__ import annotations

import csv
import json
import logging
from dataclasses import dataclass, field, replace
from typing import Mapping, Sequence

import numpy as np
from scipy import stats as scipy_stats

from .aggregation import LabeledGroup, Strategy, labeled_groups, profiles_for
from .augmentation import AugmentationSpec, add_permutations, add_winners
from .classifier import GridSearchSpec
from .dataset import Dataset, Group, sparsify
from .prediction import SingleClassError, lcp_predict, lcp_train, pacp_predict

logger = logging.getLogger(__name__)

WILCOXON_EXACT_MAX_N = 25

# Stream tags so every random draw in a run derives from the plan seed plus
# its structural coordinates, never from call order.
_TAG_FOLDS = 1
_TAG_PACP = 2
_TAG_AUG = 3
_TAG_GRID = 4
_TAG_SPARSIFY = 5

MODEL_PACP = "PACP"
MODEL_LCP = "LCP"
AUG_NONE = "none"
AUG_WINNERS = "W"
AUG_PERMUTATIONS = "P"


class UndefinedTestError(ValueError):
    """The Wilcoxon test is undefined (every paired difference is zero)."""


def _rng(*keys: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([int(k) & (2**63 - 1) for k in keys]))


def _derived_seed(*keys: int) -> int:
    return int(np.random.SeedSequence([int(k) & (2**63 - 1) for k in keys]).generate_state(1)[0])


@dataclass(frozen=True)
class FoldPlan:
    """Per-repetition partitions of the groups into k folds, shared across
    every variant evaluated in one run."""

    n_folds: int
    n_repetitions: int
    seed: int
    assignments: tuple[Mapping[str, int], ...]

    def test_ids(self, repetition: int, fold: int) -> list[str]:
        return [g for g, f in self.assignments[repetition].items() if f == fold]

    def train_ids(self, repetition: int, fold: int) -> list[str]:
        return [g for g, f in self.assignments[repetition].items() if f != fold]


def make_fold_plan(
    groups: Sequence[Group], k: int, repetitions: int, seed: int
) -> FoldPlan:
    """Deterministic unstratified shuffles; fold sizes differ by at most 1."""
    if k < 2:
        raise ValueError("need at least 2 folds")
    if repetitions < 1:
        raise ValueError("need at least 1 repetition")
    ids = [g.group_id for g in groups]
    if len(ids) < k:
        raise ValueError(f"{len(ids)} groups cannot fill {k} folds")
    assignments = []
    for rep in range(repetitions):
        rng = _rng(seed, _TAG_FOLDS, rep)
        order = rng.permutation(len(ids))
        assignment = {ids[int(i)]: pos % k for pos, i in enumerate(order)}
        assignments.append(assignment)
    return FoldPlan(k, repetitions, seed, tuple(assignments))


@dataclass(frozen=True)
class VariantSpec:
    """One evaluated configuration: model x strategy x augmentation."""

    model: str
    strategy: Strategy
    augmentation: str = AUG_NONE

    def __post_init__(self):
        if self.model not in (MODEL_PACP, MODEL_LCP):
            raise ValueError(f"unknown model {self.model!r}")
        if self.augmentation not in (AUG_NONE, AUG_WINNERS, AUG_PERMUTATIONS):
            raise ValueError(f"unknown augmentation {self.augmentation!r}")
        if self.model == MODEL_PACP and self.augmentation != AUG_NONE:
            raise ValueError("PACP takes no training set, so no augmentation")
        if not isinstance(self.strategy, Strategy):
            object.__setattr__(self, "strategy", Strategy(self.strategy))

    @property
    def name(self) -> str:
        base = f"{self.model}-{self.strategy.value}"
        return base if self.augmentation == AUG_NONE else f"{base}-{self.augmentation}"


def paper_variants(strategies: Sequence[Strategy] | None = None) -> list[VariantSpec]:
    """PACP-S, LCP-S, LCP-S-W, LCP-S-P for each strategy."""
    if strategies is None:
        strategies = [
            Strategy.AVE, Strategy.MULT, Strategy.LM,
            Strategy.SDS1, Strategy.SDS3, Strategy.COPE,
        ]
    variants = []
    for s in strategies:
        variants.append(VariantSpec(MODEL_PACP, s))
        variants.append(VariantSpec(MODEL_LCP, s))
        variants.append(VariantSpec(MODEL_LCP, s, AUG_WINNERS))
        variants.append(VariantSpec(MODEL_LCP, s, AUG_PERMUTATIONS))
    return variants


@dataclass(frozen=True, eq=False)
class VariantResult:
    spec: VariantSpec
    mean_accuracy: float
    rep_accuracies: tuple[float, ...]
    confusion: np.ndarray  # rows: actual choice, columns: predicted, all reps
    kl: float

    @property
    def name(self) -> str:
        return self.spec.name


@dataclass(frozen=True, eq=False)
class EvalReport:
    variants: tuple[VariantResult, ...]
    significance: tuple[tuple[str, str, float | None], ...]
    plan_seed: int
    seeds: Mapping[str, int] = field(default_factory=dict)
    version: str = ""

    def variant(self, name: str) -> VariantResult:
        for v in self.variants:
            if v.name == name:
                return v
        raise KeyError(name)

    def to_json_dict(self) -> dict:
        return {
            "variants": [
                {
                    "model": v.spec.model,
                    "strategy": v.spec.strategy.value,
                    "augmentation": v.spec.augmentation,
                    "mean_accuracy": v.mean_accuracy,
                    "rep_accuracies": list(v.rep_accuracies),
                    "confusion": [[int(x) for x in row] for row in v.confusion],
                    "kl": v.kl,
                }
                for v in self.variants
            ],
            "significance": [
                {"a": a, "b": b, "p": p} for a, b, p in self.significance
            ],
            "plan_seed": self.plan_seed,
            "seeds": dict(self.seeds),
            "version": self.version,
        }


def kl_divergence(predicted_counts, actual_counts) -> float:
    """KL(predicted || actual) of the choice distributions after add-one
    smoothing of both count vectors."""
    p = np.asarray(predicted_counts, dtype=float)
    q = np.asarray(actual_counts, dtype=float)
    if p.shape != q.shape or p.ndim != 1:
        raise ValueError("count vectors must share one length")
    if p.sum() <= 0 or q.sum() <= 0:
        raise ValueError("count totals must be positive")
    if np.any(p < 0) or np.any(q < 0):
        raise ValueError("counts must be non-negative")
    ps = (p + 1.0) / (p.sum() + len(p))
    qs = (q + 1.0) / (q.sum() + len(q))
    return float(np.sum(ps * np.log(ps / qs)))


def _signed_rank_statistic(a, b) -> tuple[np.ndarray, float]:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError("paired samples must share one length")
    if len(a) < 5:
        raise ValueError("need at least 5 pairs")
    d = a - b
    d = d[d != 0]
    if d.size == 0:
        raise UndefinedTestError("all paired differences are zero")
    ranks = scipy_stats.rankdata(np.abs(d))
    return ranks, float(ranks[d > 0].sum())


def _exact_upper_tail(ranks: np.ndarray, w_plus: float) -> float:
    # Average ranks are multiples of 1/2; doubling makes the statistic's
    # support integral so the sign-pattern count is an exact convolution.
    doubled = np.rint(2.0 * ranks).astype(int)
    total = int(doubled.sum())
    counts = np.zeros(total + 1)
    counts[0] = 1.0
    for r in doubled:
        shifted = np.zeros_like(counts)
        shifted[r:] = counts[: total + 1 - r]
        counts = counts + shifted
    target = int(np.rint(2.0 * w_plus))
    return float(counts[target:].sum() / 2.0 ** len(ranks))


def _normal_upper_tail(ranks: np.ndarray, w_plus: float) -> float:
    n = len(ranks)
    mean = n * (n + 1) / 4.0
    _, tie_sizes = np.unique(ranks, return_counts=True)
    variance = n * (n + 1) * (2 * n + 1) / 24.0 - ((tie_sizes**3 - tie_sizes).sum()) / 48.0
    return float(scipy_stats.norm.sf((w_plus - mean) / np.sqrt(variance)))


def wilcoxon_signed_rank(paired_a, paired_b, alternative: str = "greater") -> float:
    """One-sided Wilcoxon signed-rank p-value for ``a`` exceeding ``b``.

    Zero differences are dropped and tied absolute differences share average
    ranks. Exact distribution up to 25 remaining pairs, tie-corrected normal
    approximation above.
    """
    if alternative != "greater":
        raise ValueError("only the one-sided 'greater' alternative is supported")
    ranks, w_plus = _signed_rank_statistic(paired_a, paired_b)
    if len(ranks) <= WILCOXON_EXACT_MAX_N:
        return _exact_upper_tail(ranks, w_plus)
    return _normal_upper_tail(ranks, w_plus)


def augment_training_fold(
    training: list[LabeledGroup],
    test_group_ids: Sequence[str],
    augmentation: str,
    aug: AugmentationSpec,
    n_options: int,
) -> list[LabeledGroup]:
    """Apply the variant's augmentation to a training fold.

    Aborts if any profile in the training list belongs to the test fold:
    synthetic data must never leak test groups.
    """
    forbidden = set(test_group_ids)
    leaked = [lg.group_id for lg in training if lg.group_id in forbidden]
    assert not leaked, f"augmentation would touch test groups: {leaked}"
    if augmentation == AUG_WINNERS:
        return add_winners(training, n_options)
    if augmentation == AUG_PERMUTATIONS:
        return add_permutations(training, aug)
    return list(training)


def _constant_prediction_fallback(class_index: int, fold_size: int) -> list[int]:
    logger.warning(
        "single-class training fold; predicting class %d for all %d test groups",
        class_index, fold_size,
    )
    return [class_index] * fold_size


def evaluate(
    dataset: Dataset,
    variants: Sequence[VariantSpec],
    plan: FoldPlan,
    aug: AugmentationSpec | None = None,
    grid: GridSearchSpec | None = None,
    version: str = "",
) -> EvalReport:
    """Run every variant over the shared fold plan and report accuracy,
    confusion counts, KL-divergence, and pairwise significance."""
    from . import __version__

    aug = aug or AugmentationSpec()
    grid = grid or _default_grid()
    n = dataset.n_options
    group_index = {g.group_id: i for i, g in enumerate(dataset.groups)}
    strategies = {v.strategy for v in variants}
    profile_cache = {s: profiles_for(dataset, s) for s in strategies}
    labeled_cache = {s: {lg.group_id: lg for lg in labeled_groups(dataset, s)} for s in strategies}

    results = []
    for variant in variants:
        profiles = profile_cache[variant.strategy]
        labeled = labeled_cache[variant.strategy]
        confusion = np.zeros((n, n), dtype=int)
        rep_accuracies = []
        for rep in range(plan.n_repetitions):
            correct = 0
            for fold in range(plan.n_folds):
                test_ids = plan.test_ids(rep, fold)
                predictions = _predict_fold(
                    variant, plan, rep, fold, test_ids, profiles, labeled, aug, grid, n,
                    group_index,
                )
                for gid, predicted in zip(test_ids, predictions):
                    actual = dataset.choice(gid)
                    confusion[actual, predicted] += 1
                    correct += int(predicted == actual)
            rep_accuracies.append(correct / dataset.n_groups)
        kl = kl_divergence(confusion.sum(axis=0), confusion.sum(axis=1))
        results.append(
            VariantResult(
                variant,
                float(np.mean(rep_accuracies)),
                tuple(rep_accuracies),
                confusion,
                kl,
            )
        )

    significance = _significance_pairs(results)
    return EvalReport(
        variants=tuple(results),
        significance=tuple(significance),
        plan_seed=plan.seed,
        seeds={"plan": plan.seed, "augmentation": aug.seed},
        version=version or __version__,
    )


def _default_grid() -> GridSearchSpec:
    from .classifier import default_grid

    return default_grid()


def _predict_fold(
    variant, plan, rep, fold, test_ids, profiles, labeled, aug, grid, n, group_index
) -> list[int]:
    if variant.model == MODEL_PACP:
        return [
            pacp_predict(
                profiles[gid], _rng(plan.seed, _TAG_PACP, rep, group_index[gid])
            ).predicted_option
            for gid in test_ids
        ]
    train_ids = plan.train_ids(rep, fold)
    training = [labeled[gid] for gid in train_ids]
    cell_aug = replace(aug, seed=_derived_seed(plan.seed, _TAG_AUG, aug.seed, rep, fold))
    training = augment_training_fold(training, test_ids, variant.augmentation, cell_aug, n)
    try:
        model = lcp_train(
            training, grid, seed=_derived_seed(plan.seed, _TAG_GRID, rep, fold)
        )
    except SingleClassError as err:
        return _constant_prediction_fallback(err.class_index, len(test_ids))
    return [lcp_predict(model, profiles[gid]).predicted_option for gid in test_ids]


def _significance_pairs(results: Sequence[VariantResult]):
    """LCP-S vs PACP-S, plus each augmented LCP variant vs its base."""
    by_name = {r.name: r for r in results}
    pairs = []
    for r in results:
        s = r.spec.strategy.value
        if r.spec.model == MODEL_LCP and r.spec.augmentation == AUG_NONE:
            counterpart = f"{MODEL_PACP}-{s}"
            if counterpart in by_name:
                pairs.append((r.name, counterpart))
        if r.spec.model == MODEL_LCP and r.spec.augmentation != AUG_NONE:
            base = f"{MODEL_LCP}-{s}"
            if base in by_name:
                pairs.append((r.name, base))
    entries = []
    for a, b in pairs:
        try:
            p = wilcoxon_signed_rank(
                list(by_name[a].rep_accuracies), list(by_name[b].rep_accuracies)
            )
        except UndefinedTestError:
            logger.warning("significance %s vs %s undefined: identical accuracies", a, b)
            p = None
        except ValueError:
            p = None
        entries.append((a, b, p))
    return entries


@dataclass(frozen=True)
class SparsityPoint:
    nominal_p: float
    achieved_sparsity: float
    accuracies: Mapping[str, float]


def sparsity_sweep(
    dataset: Dataset,
    strategy: Strategy,
    p_max: float,
    step: float,
    draws: int,
    plan: FoldPlan,
    seed: int,
    grid: GridSearchSpec | None = None,
) -> list[SparsityPoint]:
    """Accuracy of PACP-S and LCP-S as ratings are removed.

    For each removal probability p in {0, step, ..., p_max}: sparsify the
    rating matrix ``draws`` times, run the full CV evaluation per draw, and
    average. Points are keyed by the achieved (not nominal) sparsity.
    """
    if not 0 < step <= p_max <= 1:
        raise ValueError("need 0 < step <= p_max <= 1")
    variants = [VariantSpec(MODEL_PACP, strategy), VariantSpec(MODEL_LCP, strategy)]
    n_steps = int(round(p_max / step))
    points = []
    for i in range(n_steps + 1):
        p = round(i * step, 10)
        achieved = []
        accs = {v.name: [] for v in variants}
        for draw in range(draws):
            result = sparsify(
                dataset.ratings, dataset.groups, p,
                _derived_seed(seed, _TAG_SPARSIFY, i, draw),
            )
            achieved.append(result.achieved_sparsity)
            report = evaluate(dataset.with_ratings(result.matrix), variants, plan, grid=grid)
            for v in report.variants:
                accs[v.name].append(v.mean_accuracy)
        points.append(
            SparsityPoint(
                nominal_p=p,
                achieved_sparsity=float(np.mean(achieved)),
                accuracies={name: float(np.mean(vals)) for name, vals in accs.items()},
            )
        )
    return points


def write_report_json(report: EvalReport, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(report.to_json_dict(), fh, indent=2)
        fh.write("\n")


def write_accuracy_csv(report: EvalReport, path) -> None:
    """Plot-ready rows for accuracy bars."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["variant", "model", "strategy", "augmentation", "mean_accuracy", "kl"])
        for v in report.variants:
            writer.writerow(
                [v.name, v.spec.model, v.spec.strategy.value, v.spec.augmentation,
                 repr(v.mean_accuracy), repr(v.kl)]
            )


def write_confusion_csv(report: EvalReport, variant_name: str, path) -> None:
    """Confusion heatmap rows: actual option, predicted option, count."""
    v = report.variant(variant_name)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["actual_option", "predicted_option", "count"])
        n = v.confusion.shape[0]
        for i in range(n):
            for j in range(n):
                writer.writerow([i + 1, j + 1, int(v.confusion[i, j])])


def write_sparsity_csv(points: Sequence[SparsityPoint], path) -> None:
    if not points:
        raise ValueError("no sparsity points to write")
    names = sorted(points[0].accuracies)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["nominal_p", "achieved_sparsity"] + [f"accuracy_{n}" for n in names])
        for pt in points:
            writer.writerow(
                [repr(pt.nominal_p), repr(pt.achieved_sparsity)]
                + [repr(pt.accuracies[n]) for n in names]
            )
