"""Normalizing transforms and Pearson-P based selection"""

import logging
import math
from typing import Callable, Iterable, Optional

import numpy as np
from scipy import optimize, stats

from app.config import settings
from app.core.exceptions import ArgumentError, DegenerateInputError, TransformError
from app.models.enums import TransformKind
from app.models.schemas import TransformSpec

logger = logging.getLogger(__name__)

MIN_NORMALITY_SAMPLE = 20
LAMBDA_EPS = 1e-12

# Candidate order doubles as the tie-break order; NONE always wins ties.
DEFAULT_CANDIDATES = tuple(TransformKind)


def pearson_normality(x: np.ndarray) -> float:
    """
    Pearson chi-square normality statistic divided by its degrees of freedom.

    Standardized values are binned into C = ceil(2 n^(2/5)) classes that are
    equiprobable under the fitted normal; the statistic is
    sum((observed - expected)^2 / expected) over C - 3 degrees of freedom.
    Smaller is more Gaussian.

    Raises:
        DegenerateInputError: If n < 20 or the sample variance is zero
    """
    x = np.asarray(x, dtype=np.float64)
    n = x.size
    if n < MIN_NORMALITY_SAMPLE:
        raise DegenerateInputError(f"Normality statistic needs at least {MIN_NORMALITY_SAMPLE} values, got {n}")
    if not np.all(np.isfinite(x)):
        raise DegenerateInputError("Normality statistic needs finite values")
    if np.ptp(x) == 0.0:
        raise DegenerateInputError("Zero-variance sample")
    sd = float(np.std(x, ddof=1))

    classes = math.ceil(2 * n ** 0.4)
    z = (x - x.mean()) / sd
    cuts = stats.norm.ppf(np.arange(1, classes) / classes)
    counts = np.bincount(np.searchsorted(cuts, z, side="left"), minlength=classes)
    expected = n / classes
    statistic = float(np.sum((counts - expected) ** 2) / expected)
    return statistic / (classes - 3)


# === Elementwise maps
def _first_violation(ok: np.ndarray) -> int:
    return int(np.flatnonzero(~ok)[0])


def _box_cox(x: np.ndarray, lmbda: float) -> np.ndarray:
    if abs(lmbda) < LAMBDA_EPS:
        return np.log(x)
    return (np.power(x, lmbda) - 1.0) / lmbda


def _yeo_johnson(x: np.ndarray, lmbda: float) -> np.ndarray:
    out = np.empty_like(x)
    pos = x >= 0
    if abs(lmbda) < LAMBDA_EPS:
        out[pos] = np.log1p(x[pos])
    else:
        out[pos] = (np.power(x[pos] + 1.0, lmbda) - 1.0) / lmbda
    if abs(lmbda - 2.0) < LAMBDA_EPS:
        out[~pos] = -np.log1p(-x[~pos])
    else:
        out[~pos] = -(np.power(1.0 - x[~pos], 2.0 - lmbda) - 1.0) / (2.0 - lmbda)
    return out


def _ordered_quantile(spec: TransformSpec, x: np.ndarray) -> np.ndarray:
    ref_x = np.asarray(spec.reference_values)
    ref_z = np.asarray(spec.reference_scores)
    slope = spec.extrapolation_slope
    out = np.interp(x, ref_x, ref_z)
    below, above = x < ref_x[0], x > ref_x[-1]
    out[below] = ref_z[0] + slope * (x[below] - ref_x[0])
    out[above] = ref_z[-1] + slope * (x[above] - ref_x[-1])
    return out


def apply_transform(spec: TransformSpec, x: np.ndarray) -> np.ndarray:
    """
    Apply a fitted transform.

    Raises:
        TransformError: With the offending index when x is outside the domain
    """
    x = np.asarray(x, dtype=np.float64)
    kind = spec.kind

    if kind == TransformKind.NONE:
        return x.copy()
    if kind == TransformKind.ARCSINH:
        return np.arcsinh(x)
    if kind == TransformKind.LOG:
        ok = x > 0
        if not ok.all():
            raise TransformError(f"log needs positive values ({spec.column})", index=_first_violation(ok))
        return np.log(x)
    if kind == TransformKind.SQRT:
        ok = x >= 0
        if not ok.all():
            raise TransformError(f"sqrt needs non-negative values ({spec.column})", index=_first_violation(ok))
        return np.sqrt(x)
    if kind == TransformKind.ARCSIN:
        upper = 100.0 if spec.percentage else 1.0
        ok = (x >= 0) & (x <= upper)
        if not ok.all():
            raise TransformError(f"arcsin needs values in [0, {upper:g}] ({spec.column})", index=_first_violation(ok))
        return np.arcsin(np.sqrt(x / upper))
    if kind == TransformKind.BOX_COX:
        ok = x > 0
        if not ok.all():
            raise TransformError(f"Box-Cox needs positive values ({spec.column})", index=_first_violation(ok))
        return _box_cox(x, spec.lmbda)
    if kind == TransformKind.YEO_JOHNSON:
        return _yeo_johnson(x, spec.lmbda)
    if kind == TransformKind.ORDERED_QUANTILE:
        return _ordered_quantile(spec, x)
    raise ArgumentError(f"Unsupported transform: {kind}")


# === Fitting
def _profile_lambda(llf: Callable[[float, np.ndarray], float], x: np.ndarray) -> float:
    """Maximize a profile log-likelihood over lambda in [-B, B]"""
    bound = settings.LAMBDA_BOUNDS
    result = optimize.minimize_scalar(
        lambda lmb: -llf(lmb, x),
        bounds=(-bound, bound),
        method="bounded",
        options={"xatol": settings.LAMBDA_TOLERANCE},
    )
    return float(result.x)


def fit_transform(
    kind: TransformKind,
    x: np.ndarray,
    column: str = "x",
    percentage: bool = False,
) -> TransformSpec:
    """
    Fit a transform's parameters on a training column.

    Raises:
        TransformError: If the column is outside the transform's domain
    """
    x = np.asarray(x, dtype=np.float64)
    if kind == TransformKind.BOX_COX:
        if not np.all(x > 0):
            raise TransformError(f"Box-Cox needs positive values ({column})", index=_first_violation(x > 0))
        spec = TransformSpec(kind=kind, column=column, lmbda=_profile_lambda(stats.boxcox_llf, x))
    elif kind == TransformKind.YEO_JOHNSON:
        spec = TransformSpec(kind=kind, column=column, lmbda=_profile_lambda(stats.yeojohnson_llf, x))
    elif kind == TransformKind.ORDERED_QUANTILE:
        distinct = np.unique(x)
        if distinct.size < 2:
            raise TransformError(f"Ordered Quantile needs at least two distinct values ({column})")
        scores = stats.norm.ppf((stats.rankdata(x, method="average") - 0.5) / x.size)
        # tied values share an average rank, hence one score per distinct value
        ref_scores = np.array([scores[x == v][0] for v in distinct])
        slope = np.polyfit(x, scores, 1)[0]
        spec = TransformSpec(
            kind=kind,
            column=column,
            reference_values=distinct.tolist(),
            reference_scores=ref_scores.tolist(),
            extrapolation_slope=float(slope),
        )
    else:
        spec = TransformSpec(kind=kind, column=column, percentage=percentage)
    apply_transform(spec, x)  # domain check
    return spec


def select_transform(
    x: np.ndarray,
    candidates: Optional[Iterable[TransformKind]] = None,
    column: str = "x",
    percentage: bool = False,
) -> TransformSpec:
    """
    Pick the candidate whose transformed column minimizes the Pearson P statistic.

    NONE is always evaluated first and wins ties; inapplicable candidates
    are skipped.

    Raises:
        ArgumentError: If x has missing values
        DegenerateInputError: If the untransformed column cannot be scored
    """
    x = np.asarray(x, dtype=np.float64)
    if np.isnan(x).any():
        raise ArgumentError(f"Column '{column}' has missing values; impute first")

    ordered = [TransformKind.NONE] + [k for k in (candidates or DEFAULT_CANDIDATES) if k != TransformKind.NONE]
    best = TransformSpec(kind=TransformKind.NONE, column=column, normality_score=pearson_normality(x))

    for kind in ordered[1:]:
        try:
            spec = fit_transform(kind, x, column, percentage)
            score = pearson_normality(apply_transform(spec, x))
        except (TransformError, DegenerateInputError) as exc:
            logger.debug(f"{column}: skipping {kind.value} ({exc})")
            continue
        if score < best.normality_score:
            best = spec.model_copy(update={"normality_score": score})

    logger.debug(f"{column}: selected {best.kind.value} (P/df={best.normality_score:.3f})")
    return best
