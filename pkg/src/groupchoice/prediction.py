"""The two choice predictors: PACP (argmax of the group profile, random on
ties) and LCP (softmax classifier over labeled profiles)."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .aggregation import GroupProfile, LabeledGroup
from .classifier import GridSearchSpec, SoftmaxModel, grid_search, predict_proba, train

PACP_TIE_TOL = 1e-12


class SingleClassError(ValueError):
    """Training profiles all carry the same choice; no classifier can be fit.

    Callers decide the fallback (the evaluation harness predicts the lone
    class and logs a warning).
    """

    def __init__(self, class_index: int):
        super().__init__(f"all training examples share class {class_index}")
        self.class_index = class_index


@dataclass(frozen=True, eq=False)
class ChoicePrediction:
    """A predicted option, with the tie set (PACP) or the class probability
    vector (LCP)."""

    group_id: str
    predicted_option: int
    tie_set: tuple[int, ...] = ()
    probabilities: np.ndarray | None = None

    def __post_init__(self):
        if self.tie_set and self.predicted_option not in self.tie_set:
            raise ValueError("predicted option must belong to the tie set")
        if self.probabilities is not None:
            probs = np.array(self.probabilities, dtype=float)
            if abs(probs.sum() - 1.0) > 1e-9:
                raise ValueError("probabilities must sum to 1")
            probs.setflags(write=False)
            object.__setattr__(self, "probabilities", probs)


def pacp_predict(
    profile: GroupProfile, seed: int | np.random.Generator = 0
) -> ChoicePrediction:
    """Predict the option with the largest profile score.

    Options within PACP_TIE_TOL of the maximum form the tie set; when more
    than one option ties, one is drawn uniformly with the given seed.
    """
    scores = profile.scores
    ties = tuple(int(j) for j in np.flatnonzero(scores >= scores.max() - PACP_TIE_TOL))
    if len(ties) == 1:
        chosen = ties[0]
    else:
        rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
        chosen = int(ties[rng.integers(len(ties))])
    return ChoicePrediction(profile.group_id, chosen, tie_set=ties)


def lcp_train(
    training: Sequence[LabeledGroup], grid: GridSearchSpec, seed: int = 0
) -> SoftmaxModel:
    """Grid-search C on the training profiles, then fit on all of them."""
    if not training:
        raise ValueError("empty training set")
    classes = {lg.choice for lg in training}
    if len(classes) < 2:
        raise SingleClassError(next(iter(classes)))
    examples = [(lg.scores, lg.choice) for lg in training]
    cfg = grid_search(examples, grid, seed)
    return train(examples, cfg)


def lcp_predict(model: SoftmaxModel, profile: GroupProfile) -> ChoicePrediction:
    """Predict the most probable class; exact float ties go to the first
    index, so the prediction is deterministic."""
    probs = predict_proba(model, profile.scores)
    return ChoicePrediction(
        profile.group_id, int(np.argmax(probs)), probabilities=probs
    )


def write_predictions_csv(
    rows: Iterable[tuple[str, str, str, int, int]], path
) -> None:
    """Export prediction rows as ``group_id,model,strategy,predicted_option,
    actual_option`` with 1-based option ids, matching the dataset CSVs."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("group_id,model,strategy,predicted_option,actual_option\n")
        for group_id, model, strategy, predicted, actual in rows:
            fh.write(f"{group_id},{model},{strategy},{predicted + 1},{actual + 1}\n")
