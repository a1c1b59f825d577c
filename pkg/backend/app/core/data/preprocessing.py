"""Preprocessing pipeline: imputation followed by per-column transform selection"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Dict, Iterable, Optional

from app.core.data.imputation import KnnImputer
from app.core.data.table import MixedTable
from app.core.data.transforms import apply_transform, select_transform
from app.core.exceptions import DegenerateInputError
from app.models.enums import TransformKind
from app.models.schemas import ImputationReport, TransformSpec

logger = logging.getLogger(__name__)


@dataclass
class PreprocessResult:
    """Output of the preprocessing pipeline"""
    table: MixedTable
    transforms: Dict[str, TransformSpec]
    imputation: ImputationReport


def preprocess(
    table: MixedTable,
    candidates: Optional[Iterable[TransformKind]] = None,
    k: Optional[int] = None,
    workers: int = 1,
) -> PreprocessResult:
    """
    Impute missing cells, then normalize each continuous column.

    Args:
        table: Raw table
        candidates: Transform battery (NONE is always included)
        k: KNN neighbour count
        workers: Threads used to fit columns concurrently

    Returns:
        PreprocessResult with the transformed table, the fitted transform
        per continuous column and the imputation report
    """
    complete, report = KnnImputer(k).impute(table)
    candidates = tuple(candidates) if candidates is not None else None

    def fit_column(column: str) -> TransformSpec:
        try:
            return select_transform(
                complete.values(column),
                candidates,
                column=column,
                percentage=column in complete.percentage_columns,
            )
        except DegenerateInputError as exc:
            logger.warning(f"{column}: left untransformed ({exc})")
            return TransformSpec(kind=TransformKind.NONE, column=column)

    columns = complete.continuous_columns
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            specs = list(pool.map(fit_column, columns))
    else:
        specs = [fit_column(c) for c in columns]

    transformed = complete
    transforms: Dict[str, TransformSpec] = {}
    for column, spec in zip(columns, specs):
        transforms[column] = spec
        if spec.kind != TransformKind.NONE:
            transformed = transformed.with_values(column, apply_transform(spec, complete.values(column)))

    chosen = sum(1 for s in specs if s.kind != TransformKind.NONE)
    logger.info(f"Preprocessed {len(columns)} continuous columns; {chosen} transformed")
    return PreprocessResult(table=transformed, transforms=transforms, imputation=report)
