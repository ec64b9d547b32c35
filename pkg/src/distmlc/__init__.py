"""Distance-regression multi-label classification toolkit.

Trains a linear map between input-space and label-space distance
profiles and turns the predicted distances into multi-label predictions
via inverse-distance weighting, nearest-reference lookup, a linearized
multilateration solve, or per-label closed-form cubics. Hyper-parameters
are tuned with closed-form leave-one-out machinery; a full multi-label
metric suite and Friedman/Nemenyi comparison tooling are included.
"""
from .data import Dataset, SplitPair, parse_arff, parse_csv, validate
from .linalg import pairwise_distances, solve_regularized_ls
from .metrics import EvalReport, LabelStats, evaluate, label_stats
from .models import (
    BrMlmModel,
    DistanceModel,
    Prediction,
    auto_alpha,
    br_mlm_predict,
    brute_force_mlc,
    categorize_uncertainty,
    idw_scores,
    lls_mlm_predict,
    ml_mlm_predict,
    multilateration_objective,
    nn_mlm_predict,
    predict_deltas,
    train,
    train_br,
)
from .modelio import load_model, save_model
from .stats import ResultTable, average_ranks, cd_diagram_data, friedman_test, nemenyi_cd
from .tuning import (
    TunedMlMlm,
    cardinality_threshold,
    local_rcut,
    loo_deltas,
    lrl,
    search_power,
    tune_ml_mlm,
)

__version__ = "0.1.0"

__all__ = [
    "BrMlmModel",
    "Dataset",
    "DistanceModel",
    "EvalReport",
    "LabelStats",
    "Prediction",
    "ResultTable",
    "SplitPair",
    "TunedMlMlm",
    "auto_alpha",
    "average_ranks",
    "br_mlm_predict",
    "brute_force_mlc",
    "cardinality_threshold",
    "categorize_uncertainty",
    "cd_diagram_data",
    "evaluate",
    "friedman_test",
    "idw_scores",
    "label_stats",
    "lls_mlm_predict",
    "load_model",
    "local_rcut",
    "loo_deltas",
    "lrl",
    "ml_mlm_predict",
    "multilateration_objective",
    "nemenyi_cd",
    "nn_mlm_predict",
    "pairwise_distances",
    "parse_arff",
    "parse_csv",
    "predict_deltas",
    "save_model",
    "search_power",
    "solve_regularized_ls",
    "train",
    "train_br",
    "tune_ml_mlm",
    "validate",
]
