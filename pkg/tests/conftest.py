import numpy as np
import pytest

from groupchoice.dataset import Dataset, Group, RatingMatrix

# The worked four-member, ten-option example used throughout: one group, all
# ratings known, group choice o2.
TABLE2 = np.array(
    [
        [6, 9, 4, 8, 5, 2, 7, 1, 10, 3],
        [7, 6, 4, 1, 2, 10, 3, 8, 9, 5],
        [1, 10, 3, 5, 9, 6, 8, 7, 2, 4],
        [6, 8, 3, 9, 1, 5, 7, 2, 10, 4],
    ],
    dtype=float,
)


@pytest.fixture
def table2_matrix() -> RatingMatrix:
    return RatingMatrix(TABLE2)


@pytest.fixture
def table2_dataset(table2_matrix) -> Dataset:
    group = Group("g1", (0, 1, 2, 3))
    return Dataset(table2_matrix, (group,), {"g1": 1})
