"""Rating-data model, CSV ingestion, preprocessing transforms, and a seeded
synthetic-dataset generator for desk-scale experiments.

Index conventions: users and options are 0-based everywhere in memory.
The CSV formats (see `ingest`) use 1-based option ids and free-form string
user/group ids.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, replace
from types import MappingProxyType
from typing import Mapping, NamedTuple, Sequence

import numpy as np

RATING_MIN = 1.0
RATING_MAX = 10.0

SCHEME_ARGMAX_AVERAGE = "argmax-average-with-noise"
SCHEME_UNIFORM_RANDOM = "uniform-random"

# Dirichlet concentration of the synthetic latent preference vector; values
# below 1 give groups a clear favorite, so profile argmaxes have usable margins.
LATENT_CONCENTRATION = 0.3


class ParseError(ValueError):
    """A CSV row could not be parsed; the message carries file and line number."""


class ValidationError(ValueError):
    """Structurally parsed data violates a dataset invariant."""


@dataclass(frozen=True, eq=False)
class RatingMatrix:
    """Partial user-by-option rating matrix. NaN marks an unknown rating.

    Known ratings must be non-negative. Rows with no known rating are
    representable (they arise from aggressive sparsification or empty ranked
    lists); ingestion and generation guarantee at least one rating per user.
    """

    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.ndim != 2:
            raise ValidationError("rating matrix must be 2-dimensional")
        known = ~np.isnan(values)
        if np.any(values[known] < 0):
            raise ValidationError("ratings must be non-negative")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def n_users(self) -> int:
        return self.values.shape[0]

    @property
    def n_options(self) -> int:
        return self.values.shape[1]

    @property
    def known_mask(self) -> np.ndarray:
        return ~np.isnan(self.values)

    @property
    def n_known(self) -> int:
        return int(self.known_mask.sum())

    @classmethod
    def from_entries(
        cls,
        n_users: int,
        n_options: int,
        entries: Mapping[tuple[int, int], float],
    ) -> "RatingMatrix":
        values = np.full((n_users, n_options), np.nan)
        for (u, o), r in entries.items():
            if not (0 <= u < n_users and 0 <= o < n_options):
                raise ValidationError(f"rating index ({u}, {o}) out of range")
            values[u, o] = r
        return cls(values)


@dataclass(frozen=True)
class Group:
    """A set of users that made one joint choice."""

    group_id: str
    members: tuple[int, ...]

    def __post_init__(self):
        members = tuple(int(m) for m in self.members)
        if not members:
            raise ValidationError(f"group {self.group_id!r} has no members")
        if len(set(members)) != len(members):
            raise ValidationError(f"group {self.group_id!r} lists a member twice")
        if min(members) < 0:
            raise ValidationError(f"group {self.group_id!r} has a negative user index")
        object.__setattr__(self, "members", members)

    def __len__(self) -> int:
        return len(self.members)


@dataclass(frozen=True, eq=False)
class Dataset:
    """Ratings, group memberships, and each group's observed choice."""

    ratings: RatingMatrix
    groups: tuple[Group, ...]
    choices: Mapping[str, int]
    option_labels: tuple[str, ...] | None = None

    def __post_init__(self):
        groups = tuple(self.groups)
        choices = MappingProxyType(dict(self.choices))
        n_options = self.ratings.n_options

        ids = [g.group_id for g in groups]
        if len(set(ids)) != len(ids):
            raise ValidationError("duplicate group ids")
        member_of: dict[int, str] = {}
        for g in groups:
            if len(g) < 2:
                raise ValidationError(f"group {g.group_id!r} has fewer than two members")
            for u in g.members:
                if u >= self.ratings.n_users:
                    raise ValidationError(
                        f"group {g.group_id!r} references unknown user index {u}"
                    )
                if u in member_of:
                    raise ValidationError(
                        f"user {u} belongs to both group {member_of[u]!r} "
                        f"and group {g.group_id!r}"
                    )
                member_of[u] = g.group_id
        id_set = set(ids)
        for g in groups:
            if g.group_id not in choices:
                raise ValidationError(f"group {g.group_id!r} has no recorded choice")
        for gid, c in choices.items():
            if gid not in id_set:
                raise ValidationError(f"choice recorded for unknown group {gid!r}")
            if not 0 <= int(c) < n_options:
                raise ValidationError(
                    f"group {gid!r} chose option index {c}, outside 0..{n_options - 1}"
                )
        if self.option_labels is not None:
            labels = tuple(self.option_labels)
            if len(labels) != n_options:
                raise ValidationError("option_labels length must equal n_options")
            object.__setattr__(self, "option_labels", labels)
        object.__setattr__(self, "groups", groups)
        object.__setattr__(self, "choices", choices)
        object.__setattr__(self, "_by_id", {g.group_id: g for g in groups})

    @property
    def n_users(self) -> int:
        return self.ratings.n_users

    @property
    def n_options(self) -> int:
        return self.ratings.n_options

    @property
    def n_groups(self) -> int:
        return len(self.groups)

    def group(self, group_id: str) -> Group:
        return self._by_id[group_id]

    def choice(self, group_id: str) -> int:
        return self.choices[group_id]

    def with_ratings(self, ratings: RatingMatrix) -> "Dataset":
        """Same groups and choices over a different rating matrix."""
        return replace(self, ratings=ratings)


def _read_rows(path, expected_header: list[str]):
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError(f"{path}: empty file") from None
        if [h.strip() for h in header] != expected_header:
            raise ParseError(
                f"{path}:1: expected header {','.join(expected_header)!r}, "
                f"got {','.join(header)!r}"
            )
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(expected_header):
                raise ParseError(
                    f"{path}:{lineno}: expected {len(expected_header)} fields, got {len(row)}"
                )
            yield lineno, [field.strip() for field in row]


def ingest(ratings_csv, groups_csv, choices_csv) -> Dataset:
    """Load and validate a dataset from the three canonical CSV files.

    ratings.csv: ``user_id,option_id,rating`` with option ids 1..n and ratings
    on the 1-10 scale. groups.csv: ``group_id,user_id``. choices.csv:
    ``group_id,option_id``, exactly one row per group.
    """
    user_index: dict[str, int] = {}
    entries: dict[tuple[int, int], float] = {}
    max_option = 0
    for lineno, (user_id, option_raw, rating_raw) in _read_rows(
        ratings_csv, ["user_id", "option_id", "rating"]
    ):
        try:
            option = int(option_raw)
        except ValueError:
            raise ParseError(
                f"{ratings_csv}:{lineno}: option_id {option_raw!r} is not an integer"
            ) from None
        try:
            rating = float(rating_raw)
        except ValueError:
            raise ParseError(
                f"{ratings_csv}:{lineno}: rating {rating_raw!r} is not a number"
            ) from None
        if option < 1:
            raise ParseError(f"{ratings_csv}:{lineno}: option ids start at 1")
        if not RATING_MIN <= rating <= RATING_MAX:
            raise ParseError(
                f"{ratings_csv}:{lineno}: rating {rating:g} outside the "
                f"{RATING_MIN:g}-{RATING_MAX:g} range"
            )
        u = user_index.setdefault(user_id, len(user_index))
        key = (u, option - 1)
        if key in entries:
            raise ParseError(
                f"{ratings_csv}:{lineno}: duplicate rating for user {user_id!r}, "
                f"option {option}"
            )
        entries[key] = rating
        max_option = max(max_option, option)
    if not entries:
        raise ParseError(f"{ratings_csv}: no rating rows")

    members: dict[str, list[int]] = {}
    grouped_users: set[int] = set()
    for lineno, (group_id, user_id) in _read_rows(groups_csv, ["group_id", "user_id"]):
        if user_id not in user_index:
            raise ValidationError(
                f"{groups_csv}:{lineno}: user {user_id!r} has no ratings"
            )
        members.setdefault(group_id, []).append(user_index[user_id])
        grouped_users.add(user_index[user_id])

    ungrouped = set(user_index.values()) - grouped_users
    if ungrouped:
        names = [uid for uid, idx in user_index.items() if idx in ungrouped]
        raise ValidationError(
            f"users with ratings but no group: {', '.join(sorted(names)[:5])}"
        )

    choices: dict[str, int] = {}
    for lineno, (group_id, option_raw) in _read_rows(
        choices_csv, ["group_id", "option_id"]
    ):
        try:
            option = int(option_raw)
        except ValueError:
            raise ParseError(
                f"{choices_csv}:{lineno}: option_id {option_raw!r} is not an integer"
            ) from None
        if group_id in choices:
            raise ValidationError(
                f"{choices_csv}:{lineno}: duplicate choice for group {group_id!r}"
            )
        choices[group_id] = option - 1

    matrix = RatingMatrix.from_entries(len(user_index), max_option, entries)
    groups = tuple(Group(gid, tuple(m)) for gid, m in members.items())
    return Dataset(ratings=matrix, groups=groups, choices=choices)


def ranks_to_ratings(
    ranked_lists: Sequence[Sequence[int]], n_options: int
) -> RatingMatrix:
    """Convert per-user preference-ordered option lists into ratings.

    The first-ranked option gets 10, the second 9, and so on; options absent
    from a user's list stay unknown. Lists longer than 10 cannot be expressed
    on the 1-10 scale and are rejected.
    """
    values = np.full((len(ranked_lists), n_options), np.nan)
    for u, ranked in enumerate(ranked_lists):
        ranked = list(ranked)
        if len(ranked) > int(RATING_MAX):
            raise ValidationError(
                f"user {u}: ranked list of length {len(ranked)} exceeds the "
                f"{int(RATING_MAX)}-point scale"
            )
        if len(set(ranked)) != len(ranked):
            raise ValidationError(f"user {u}: duplicate option in ranked list")
        for position, option in enumerate(ranked):
            if not 0 <= option < n_options:
                raise ValidationError(
                    f"user {u}: option index {option} outside 0..{n_options - 1}"
                )
            values[u, option] = RATING_MAX - position
    return RatingMatrix(values)


def square_ratings(matrix: RatingMatrix) -> RatingMatrix:
    """Replace every known rating r with r**2; unknown entries stay unknown.

    Amplifies the gap between highly and lowly rated options before
    aggregation; a monotone transform, so per-user orderings are preserved.
    """
    return RatingMatrix(matrix.values**2)


@dataclass(frozen=True)
class SyntheticSchemeSpec:
    """Parameters of the synthetic choice scheme.

    With ``kind=SCHEME_ARGMAX_AVERAGE`` a group's recorded choice is the
    argmax of its members' mean rating vector with probability ``1 - noise``,
    and otherwise a uniform draw among the ``top_k`` highest-mean options.
    ``SCHEME_UNIFORM_RANDOM`` records a uniform choice over all options.
    """

    kind: str = SCHEME_ARGMAX_AVERAGE
    noise: float = 0.0
    top_k: int = 3
    group_size_range: tuple[int, int] = (2, 5)
    rating_noise_scale: float = 0.35
    seed: int = 0

    def __post_init__(self):
        if self.kind not in (SCHEME_ARGMAX_AVERAGE, SCHEME_UNIFORM_RANDOM):
            raise ValidationError(f"unknown scheme kind {self.kind!r}")
        if not 0.0 <= self.noise <= 1.0:
            raise ValidationError("noise must be within [0, 1]")
        if self.top_k < 1:
            raise ValidationError("top_k must be at least 1")
        lo, hi = self.group_size_range
        if not 1 <= lo <= hi:
            raise ValidationError("invalid group size range")
        if self.rating_noise_scale < 0:
            raise ValidationError("rating noise scale must be non-negative")


def generate_synthetic(
    spec: SyntheticSchemeSpec, n_groups: int, n_options: int
) -> Dataset:
    """Generate a dense synthetic dataset with a known choice scheme.

    Each group's members share a Dirichlet latent preference vector; member
    ratings are the latent plus independent uniform noise, min-max rescaled to
    the 1-10 range (continuous, so rating ties have probability zero). The
    choice is drawn per ``spec``. Deterministic for a given seed.
    """
    if n_groups < 1:
        raise ValidationError("n_groups must be at least 1")
    if spec.top_k > n_options:
        raise ValidationError("top_k cannot exceed n_options")
    rng = np.random.default_rng(spec.seed)
    lo, hi = spec.group_size_range
    blocks = []
    groups = []
    choices = {}
    next_user = 0
    for gi in range(n_groups):
        size = int(rng.integers(lo, hi + 1))
        latent = rng.dirichlet(np.full(n_options, LATENT_CONCENTRATION))
        noise = rng.uniform(-1.0, 1.0, size=(size, n_options)) / n_options
        raw = latent[None, :] + spec.rating_noise_scale * noise
        spread = raw.max(axis=1) - raw.min(axis=1)
        spread[spread == 0] = 1.0
        block = RATING_MIN + (RATING_MAX - RATING_MIN) * (
            (raw - raw.min(axis=1, keepdims=True)) / spread[:, None]
        )
        ave = block.mean(axis=0)
        order = np.argsort(-ave, kind="stable")
        if spec.kind == SCHEME_UNIFORM_RANDOM:
            chosen = int(rng.integers(n_options))
        elif rng.uniform() < spec.noise:
            chosen = int(order[int(rng.integers(spec.top_k))])
        else:
            chosen = int(order[0])
        gid = f"g{gi + 1}"
        groups.append(Group(gid, tuple(range(next_user, next_user + size))))
        choices[gid] = chosen
        blocks.append(block)
        next_user += size
    matrix = RatingMatrix(np.vstack(blocks))
    return Dataset(ratings=matrix, groups=tuple(groups), choices=choices)


class SparsifyResult(NamedTuple):
    matrix: RatingMatrix
    achieved_sparsity: float


def sparsify(
    matrix: RatingMatrix, groups: Sequence[Group], p: float, seed: int
) -> SparsifyResult:
    """Remove each known rating independently with probability p.

    A removal that would leave some option with zero raters inside some group
    is rejected (the rating is kept), so achieved sparsity runs below the
    nominal p. Reproducible for a given seed.
    """
    if not 0.0 <= p <= 1.0:
        raise ValidationError("p must be within [0, 1]")
    values = matrix.values.copy()
    known = ~np.isnan(values)
    total = int(known.sum())
    members_of: dict[str, np.ndarray] = {
        g.group_id: np.asarray(g.members) for g in groups
    }
    group_of: dict[int, str] = {u: g.group_id for g in groups for u in g.members}
    rng = np.random.default_rng(seed)
    candidates = (rng.uniform(size=values.shape) < p) & known
    removed = 0
    for u, o in zip(*np.nonzero(candidates)):
        gid = group_of.get(int(u))
        if gid is not None:
            col = values[members_of[gid], o]
            if np.count_nonzero(~np.isnan(col)) <= 1:
                continue
        values[u, o] = np.nan
        removed += 1
    achieved = removed / total if total else 0.0
    return SparsifyResult(RatingMatrix(values), achieved)
