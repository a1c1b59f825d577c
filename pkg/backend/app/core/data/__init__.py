"""Mixed-type data handling: tables, imputation and normalization"""

from .imputation import KnnImputer, heom_distance, knn_impute
from .preprocessing import PreprocessResult, preprocess
from .table import MixedTable, read_table
from .transforms import apply_transform, fit_transform, pearson_normality, select_transform

__all__ = [
    "KnnImputer",
    "heom_distance",
    "knn_impute",
    "PreprocessResult",
    "preprocess",
    "MixedTable",
    "read_table",
    "apply_transform",
    "fit_transform",
    "pearson_normality",
    "select_transform",
]
