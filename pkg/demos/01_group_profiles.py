"""Walk through group profile construction on a small worked example.

Four friends rated ten options on a 1-10 scale. Each aggregation strategy
condenses the four rating rows into one normalized score vector; the argmax
of that vector is what the mechanical predictor (PACP) would bet on.
"""
import numpy as np

from groupchoice import Dataset, Group, RatingMatrix, Strategy, aggregate, copeland_matrix

ratings = np.array(
    [
        [6, 9, 4, 8, 5, 2, 7, 1, 10, 3],
        [7, 6, 4, 1, 2, 10, 3, 8, 9, 5],
        [1, 10, 3, 5, 9, 6, 8, 7, 2, 4],
        [6, 8, 3, 9, 1, 5, 7, 2, 10, 4],
    ],
    dtype=float,
)

dataset = Dataset(RatingMatrix(ratings), (Group("friends", (0, 1, 2, 3)),), {"friends": 1})
group = dataset.groups[0]

print("member ratings (rows: members, columns: options o1..o10)")
print(ratings.astype(int))
print()

header = "".join(f"   o{j + 1:<4}" for j in range(10))
print(f"{'strategy':8}{header}  argmax")
for strategy in Strategy:
    profile = aggregate(dataset, group, strategy)
    row = "".join(f"{score:8.3f}" for score in profile.scores)
    print(f"{strategy.value:8}{row}  o{int(np.argmax(profile.scores)) + 1}")

print()
print("Copeland pairwise-majority matrix (+1: column option beats row option)")
print(copeland_matrix(dataset, group))
print()
print("Note how rank-based strategies (SDS1, COPE) and value-based ones")
print("(AVE, MULT) disagree about how close the race is, even when they")
print("agree on the winner.")
