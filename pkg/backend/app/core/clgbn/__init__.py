"""Conditional Linear Gaussian networks: fitting, scoring and prediction"""

from .local import DataMatrix, LocalDiscrete, LocalFitter, LocalGaussian
from .model import (
    ClgbnFit,
    aic,
    bic,
    check_clgbn_constraint,
    fit,
    log_likelihood,
    predict_column,
    predict_node,
    row_log_densities,
)
from .scoring import LocalScorer, penalty_per_param
from .serialization import FitDocument, from_document, load_fit, save_fit, to_document

__all__ = [
    "ClgbnFit",
    "DataMatrix",
    "FitDocument",
    "LocalDiscrete",
    "LocalFitter",
    "LocalGaussian",
    "LocalScorer",
    "aic",
    "bic",
    "check_clgbn_constraint",
    "fit",
    "from_document",
    "load_fit",
    "log_likelihood",
    "penalty_per_param",
    "predict_column",
    "predict_node",
    "row_log_densities",
    "save_fit",
    "to_document",
]
