"""Model comparison and cross-validated predictive accuracy"""

from .comparison import comparison_frame, compare_models, render_comparison, render_cv_report
from .cross_validation import LearningSpec, cross_validate, kfold_split

__all__ = [
    "LearningSpec",
    "compare_models",
    "comparison_frame",
    "cross_validate",
    "kfold_split",
    "render_comparison",
    "render_cv_report",
]
