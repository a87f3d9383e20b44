"""Group profiles: per-strategy aggregation of member ratings into a
normalized score vector over the options.

Unknown ratings are handled per strategy by using only the available member
ratings; an option rated by nobody in the group gets score 0 so it can never
win the argmax unless every score is 0.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence

import numpy as np

from .dataset import Dataset, Group

PROFILE_SUM_TOL = 1e-9


class Strategy(str, Enum):
    """Preference aggregation strategies; values are the serialized tokens."""

    AVE = "AVE"
    MULT = "MULT"
    LM = "LM"
    SDS1 = "SDS1"
    SDS3 = "SDS3"
    COPE = "COPE"
    BORDA = "BORDA"
    MPL = "MPL"


@dataclass(frozen=True, eq=False)
class GroupProfile:
    """Normalized per-option group scores under one strategy."""

    scores: np.ndarray
    strategy: Strategy
    group_id: str

    def __post_init__(self):
        scores = np.array(self.scores, dtype=float)
        if scores.ndim != 1:
            raise ValueError("profile scores must be a vector")
        if np.any(scores < 0):
            raise ValueError("profile scores must be non-negative")
        if abs(scores.sum() - 1.0) > PROFILE_SUM_TOL:
            raise ValueError("profile scores must sum to 1")
        scores.setflags(write=False)
        object.__setattr__(self, "scores", scores)

    @property
    def n_options(self) -> int:
        return len(self.scores)


@dataclass(frozen=True, eq=False)
class LabeledGroup:
    """A group profile paired with the observed choice; the training unit."""

    group_id: str
    scores: np.ndarray
    choice: int

    def __post_init__(self):
        scores = np.array(self.scores, dtype=float)
        scores.setflags(write=False)
        object.__setattr__(self, "scores", scores)
        if not 0 <= int(self.choice) < len(scores):
            raise ValueError(f"choice {self.choice} outside the option range")


def normalize(raw_scores: np.ndarray) -> np.ndarray:
    """Divide by the total so entries sum to 1; an all-zero vector becomes
    uniform. Negative entries are a caller error (shift first)."""
    raw = np.asarray(raw_scores, dtype=float)
    if not np.all(np.isfinite(raw)):
        raise ValueError("scores must be finite")
    if np.any(raw < 0):
        raise ValueError("scores must be non-negative before normalization")
    total = raw.sum()
    if total == 0:
        return np.full(len(raw), 1.0 / len(raw))
    return raw / total


def copeland_matrix(dataset: Dataset, group: Group) -> np.ndarray:
    """Pairwise majority matrix M with entries in {-1, 0, +1}.

    M[i, j] = +1 when more members rate option j above option i, counting only
    members who rated both. Antisymmetric with a zero diagonal.
    """
    ratings = dataset.ratings.values[list(group.members)]
    # NaN comparisons are False, so non-co-raters drop out of both counts.
    prefer_col = (ratings[:, :, None] < ratings[:, None, :]).sum(axis=0)
    return np.sign(prefer_col - prefer_col.T).astype(int)


def _per_user_top_counts(ratings: np.ndarray, k: int) -> np.ndarray:
    """Count, per option, the members holding it among their top-k rated
    options. Ties broken by rating descending then option index ascending."""
    n = ratings.shape[1]
    counts = np.zeros(n)
    for row in ratings:
        rated = np.flatnonzero(~np.isnan(row))
        if rated.size == 0:
            continue
        order = rated[np.lexsort((rated, -row[rated]))]
        counts[order[: min(k, len(order))]] += 1
    return counts


def _borda_points(ratings: np.ndarray) -> np.ndarray:
    """Sum per-user Borda points: a user's k rated options earn k-1..0 by
    rating rank, with tied ratings sharing the average of their points."""
    n = ratings.shape[1]
    scores = np.zeros(n)
    for row in ratings:
        rated = np.flatnonzero(~np.isnan(row))
        k = rated.size
        if k == 0:
            continue
        order = rated[np.argsort(-row[rated], kind="stable")]
        points = np.arange(k - 1, -1, -1, dtype=float)
        i = 0
        while i < k:
            j = i
            while j + 1 < k and row[order[j + 1]] == row[order[i]]:
                j += 1
            scores[order[i : j + 1]] += points[i : j + 1].mean()
            i = j + 1
    return scores


def _raw_scores(ratings: np.ndarray, strategy: Strategy, cope: np.ndarray | None) -> np.ndarray:
    known = ~np.isnan(ratings)
    rated_options = known.any(axis=0)
    n = ratings.shape[1]
    raw = np.zeros(n)
    if strategy is Strategy.AVE:
        raw[rated_options] = np.nanmean(ratings[:, rated_options], axis=0)
    elif strategy is Strategy.MULT:
        filled = np.where(known, ratings, 1.0)
        raw[rated_options] = np.prod(filled, axis=0)[rated_options]
    elif strategy is Strategy.LM:
        raw[rated_options] = np.nanmin(ratings[:, rated_options], axis=0)
    elif strategy is Strategy.MPL:
        raw[rated_options] = np.nanmax(ratings[:, rated_options], axis=0)
    elif strategy is Strategy.SDS1:
        raw = _per_user_top_counts(ratings, 1)
    elif strategy is Strategy.SDS3:
        raw = _per_user_top_counts(ratings, 3)
    elif strategy is Strategy.BORDA:
        raw = _borda_points(ratings)
    elif strategy is Strategy.COPE:
        # Column sums are the Copeland scores (wins minus losses). They sum to
        # zero, so shift by the minimum over rated options before Eq.-style
        # normalization; unrated options stay pinned at 0.
        scores = cope.sum(axis=0).astype(float)
        if rated_options.any():
            raw[rated_options] = scores[rated_options] - scores[rated_options].min()
    else:  # pragma: no cover - exhaustive enum
        raise ValueError(f"unknown strategy {strategy!r}")
    return raw


def aggregate(dataset: Dataset, group: Group, strategy: Strategy | str) -> GroupProfile:
    """Build the normalized group profile for one group under a strategy."""
    if not isinstance(strategy, Strategy):
        strategy = Strategy(strategy)  # raises ValueError on unknown tokens
    if not group.members:
        raise ValueError("empty group")
    for u in group.members:
        if u >= dataset.ratings.n_users:
            raise ValueError(f"group member {u} not in the rating matrix")
    ratings = dataset.ratings.values[list(group.members)]
    cope = copeland_matrix(dataset, group) if strategy is Strategy.COPE else None
    raw = _raw_scores(ratings, strategy, cope)
    return GroupProfile(normalize(raw), strategy, group.group_id)


def profiles_for(
    dataset: Dataset, strategy: Strategy | str, groups: Iterable[Group] | None = None
) -> dict[str, GroupProfile]:
    """Profiles for every group (or a subset), keyed by group id."""
    groups = dataset.groups if groups is None else tuple(groups)
    return {g.group_id: aggregate(dataset, g, strategy) for g in groups}


def labeled_groups(
    dataset: Dataset, strategy: Strategy | str, groups: Iterable[Group] | None = None
) -> list[LabeledGroup]:
    """Pair each group's profile with its observed choice."""
    groups = dataset.groups if groups is None else tuple(groups)
    return [
        LabeledGroup(
            g.group_id,
            aggregate(dataset, g, strategy).scores,
            dataset.choice(g.group_id),
        )
        for g in groups
    ]


def write_profiles_csv(profiles: Sequence[GroupProfile], path) -> None:
    """Export profiles as ``group_id,strategy,score_1,...,score_n`` at full
    precision."""
    if not profiles:
        raise ValueError("no profiles to write")
    n = profiles[0].n_options
    with open(path, "w", encoding="utf-8", newline="") as fh:
        header = ["group_id", "strategy"] + [f"score_{j + 1}" for j in range(n)]
        fh.write(",".join(header) + "\n")
        for profile in profiles:
            if profile.n_options != n:
                raise ValueError("profiles have mixed option counts")
            row = [profile.group_id, profile.strategy.value]
            row += [repr(float(s)) for s in profile.scores]
            fh.write(",".join(row) + "\n")
