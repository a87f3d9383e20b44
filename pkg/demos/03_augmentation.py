"""What Winners and Permutations actually add to a training set.

Winners encode the unanimity axiom as ten one-hot profiles. Permutations
clone observed profiles with the option axis shuffled, teaching the
classifier that only the score pattern matters, not the option identity.
"""
import numpy as np

from groupchoice import (
    AugmentationSpec,
    Strategy,
    SyntheticSchemeSpec,
    add_permutations,
    add_winners,
    generate_synthetic,
    labeled_groups,
)
from groupchoice.augmentation import observed_choice_distribution

dataset = generate_synthetic(SyntheticSchemeSpec(noise=0.3, seed=8), 60, 10)
training = labeled_groups(dataset, Strategy.AVE)
print(f"observed training set: {len(training)} groups")
print("choice distribution:", np.round(observed_choice_distribution(training, 10), 3))
print()

with_winners = add_winners(training, 10)
print(f"after Winners: {len(with_winners)} rows; the appended ten are one-hot:")
for lg in with_winners[-3:]:
    print(f"  {lg.group_id}: scores {lg.scores.astype(int)} -> choice o{lg.choice + 1}")
print("  ...")
print()

spec = AugmentationSpec(n_permutations=1200, seed=8)
with_perms = add_permutations(training, spec)
example = with_perms[len(training)]
source = next(
    lg for lg in training
    if sorted(np.round(lg.scores, 12)) == sorted(np.round(example.scores, 12))
)
print(f"after Permutations: {len(with_perms)} rows")
print(f"  source  {source.group_id}: choice o{source.choice + 1}, scores {np.round(source.scores, 3)}")
print(f"  permuted {example.group_id}: choice o{example.choice + 1}, scores {np.round(example.scores, 3)}")
print(
    "  the score multiset is identical and the chosen option carries the "
    f"same score ({example.scores[example.choice]:.3f})"
)
print()

perm_labels = np.zeros(10)
for lg in with_perms[len(training):]:
    perm_labels[lg.choice] += 1
print("label distribution of the 1200 additions:", np.round(perm_labels / 1200, 3))
print("which tracks the observed distribution above, so augmentation does not")
print("tilt the class balance the classifier trains against.")
