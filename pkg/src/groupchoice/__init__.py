"""Group choice prediction from members' individual ratings.

Two predictors over aggregated group profiles: PACP picks the profile argmax,
LCP trains a softmax classifier on observed (profile, choice) pairs, with
optional Winners/Permutations training-set augmentation and a reproducible
cross-validation harness.
"""

__version__ = "0.1.0"

from .aggregation import (
    GroupProfile,
    LabeledGroup,
    Strategy,
    aggregate,
    copeland_matrix,
    labeled_groups,
    normalize,
    profiles_for,
    write_profiles_csv,
)
from .augmentation import AugmentationSpec, add_permutations, add_winners
from .classifier import (
    GridSearchSpec,
    SoftmaxModel,
    TrainConfig,
    default_grid,
    full_grid,
    grid_search,
    model_from_json,
    model_to_json,
    predict_proba,
    train,
)
from .dataset import (
    Dataset,
    Group,
    ParseError,
    RatingMatrix,
    SparsifyResult,
    SyntheticSchemeSpec,
    ValidationError,
    generate_synthetic,
    ingest,
    ranks_to_ratings,
    sparsify,
    square_ratings,
)
from .evalharness import (
    EvalReport,
    FoldPlan,
    SparsityPoint,
    UndefinedTestError,
    VariantResult,
    VariantSpec,
    evaluate,
    kl_divergence,
    make_fold_plan,
    paper_variants,
    sparsity_sweep,
    wilcoxon_signed_rank,
    write_report_json,
)
from .prediction import (
    ChoicePrediction,
    SingleClassError,
    lcp_predict,
    lcp_train,
    pacp_predict,
    write_predictions_csv,
)

__all__ = [
    "AugmentationSpec",
    "ChoicePrediction",
    "Dataset",
    "EvalReport",
    "FoldPlan",
    "GridSearchSpec",
    "Group",
    "GroupProfile",
    "LabeledGroup",
    "ParseError",
    "RatingMatrix",
    "SingleClassError",
    "SoftmaxModel",
    "SparsifyResult",
    "SparsityPoint",
    "Strategy",
    "SyntheticSchemeSpec",
    "TrainConfig",
    "UndefinedTestError",
    "ValidationError",
    "VariantResult",
    "VariantSpec",
    "add_permutations",
    "add_winners",
    "aggregate",
    "copeland_matrix",
    "default_grid",
    "evaluate",
    "full_grid",
    "generate_synthetic",
    "grid_search",
    "ingest",
    "kl_divergence",
    "labeled_groups",
    "lcp_predict",
    "lcp_train",
    "make_fold_plan",
    "model_from_json",
    "model_to_json",
    "normalize",
    "pacp_predict",
    "paper_variants",
    "predict_proba",
    "profiles_for",
    "ranks_to_ratings",
    "sparsify",
    "sparsity_sweep",
    "square_ratings",
    "train",
    "wilcoxon_signed_rank",
    "write_predictions_csv",
    "write_profiles_csv",
    "write_report_json",
]
