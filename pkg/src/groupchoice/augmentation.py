"""Training-set augmentation with synthetic labeled profiles.

Winners: one one-hot profile per option, labeled with that option (unanimity
implies the choice). Permutations: clones of observed profiles with the
option axis permuted and the label mapped through the same permutation, so
the score multiset is preserved and only relative score patterns matter.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .aggregation import LabeledGroup


@dataclass(frozen=True, eq=False)
class AugmentationSpec:
    """Parameters for synthetic profile generation.

    ``target_distribution`` is the choice distribution the permuted labels are
    sampled from; None means the observed distribution of the training
    choices, which leaves the training label distribution unchanged.
    """

    winners: bool = False
    n_permutations: int = 0
    target_distribution: np.ndarray | None = None
    seed: int = 0

    def __post_init__(self):
        if self.n_permutations < 0:
            raise ValueError("n_permutations must be non-negative")
        if self.target_distribution is not None:
            p = np.array(self.target_distribution, dtype=float)
            if np.any(p < 0) or abs(p.sum() - 1.0) > 1e-9:
                raise ValueError("target distribution must be non-negative and sum to 1")
            p.setflags(write=False)
            object.__setattr__(self, "target_distribution", p)


def one_hot(index: int, n_options: int) -> np.ndarray:
    v = np.zeros(n_options)
    v[index] = 1.0
    return v


def add_winners(
    training: Sequence[LabeledGroup], n_options: int
) -> list[LabeledGroup]:
    """Append one one-hot profile per option, labeled with its hot option.

    Always appends exactly n_options rows; applying twice duplicates them
    (dedup is the caller's concern). The input list is never modified.
    """
    if n_options < 1:
        raise ValueError("n_options must be at least 1")
    winners = [
        LabeledGroup(f"winner_{j + 1}", one_hot(j, n_options), j)
        for j in range(n_options)
    ]
    return list(training) + winners


def observed_choice_distribution(
    training: Sequence[LabeledGroup], n_options: int
) -> np.ndarray:
    counts = np.zeros(n_options)
    for lg in training:
        counts[lg.choice] += 1
    return counts / counts.sum()


def _random_permutation_sending(
    source: int, target: int, n: int, rng: np.random.Generator
) -> np.ndarray:
    """Uniform draw among the (n-1)! permutations mapping position ``source``
    to position ``target`` (as an old-index -> new-index array)."""
    sigma = np.empty(n, dtype=int)
    sigma[source] = target
    rest_old = [k for k in range(n) if k != source]
    rest_new = np.asarray([k for k in range(n) if k != target])
    sigma[rest_old] = rest_new[rng.permutation(n - 1)]
    return sigma


def permute_profile(scores: np.ndarray, sigma: np.ndarray) -> np.ndarray:
    """Move the score at old position k to new position sigma[k]."""
    permuted = np.empty_like(scores)
    permuted[sigma] = scores
    return permuted


def add_permutations(
    training: Sequence[LabeledGroup], spec: AugmentationSpec
) -> list[LabeledGroup]:
    """Append ``spec.n_permutations`` permuted clones of training profiles.

    Each addition samples a target choice j from the target distribution, a
    source group with a different choice (uniformly, with repetition), and a
    uniform permutation sending the source choice to j. Deterministic for a
    given seed.
    """
    if not training:
        raise ValueError("empty training set")
    n = len(training[0].scores)
    rng = np.random.default_rng(spec.seed)
    p = spec.target_distribution
    if p is None:
        p = observed_choice_distribution(training, n)
    elif len(p) != n:
        raise ValueError("target distribution length must equal n_options")
    by_other_choice: dict[int, list[LabeledGroup]] = {
        j: [lg for lg in training if lg.choice != j] for j in range(n)
    }
    for j in np.flatnonzero(p > 0):
        if not by_other_choice[int(j)]:
            raise ValueError(
                f"no training group with a choice other than option {int(j) + 1}; "
                "cannot permute toward it"
            )
    out = list(training)
    for l in range(spec.n_permutations):
        j = int(rng.choice(n, p=p))
        pool = by_other_choice[j]
        source = pool[int(rng.integers(len(pool)))]
        sigma = _random_permutation_sending(source.choice, j, n, rng)
        out.append(
            LabeledGroup(f"perm_{l + 1}", permute_profile(source.scores, sigma), j)
        )
    return out
