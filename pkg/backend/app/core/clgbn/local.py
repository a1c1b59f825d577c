"""Local distributions of a Conditional Linear Gaussian network"""

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from app.config import settings
from app.core.data.table import MixedTable
from app.core.exceptions import ArgumentError, CollinearityError, FitError
from app.models.enums import NodeKind

logger = logging.getLogger(__name__)

LOG_2PI = math.log(2.0 * math.pi)


class DataMatrix:
    """
    Numeric view of a complete MixedTable.

    Discrete columns become integer code arrays, continuous columns float
    arrays. Built once per dataset and shared by every local fit.
    """

    def __init__(self, table: MixedTable):
        if not table.is_complete:
            raise ArgumentError(
                f"Table has {table.n_missing} missing cells; run preprocessing (imputation) first"
            )
        self.table = table
        self.n = table.n_rows
        self.kinds: Dict[str, NodeKind] = table.schema
        self.order = {name: i for i, name in enumerate(table.columns)}
        self.codes: Dict[str, np.ndarray] = {c: table.codes(c) for c in table.discrete_columns}
        self.levels: Dict[str, List] = {c: table.levels(c) for c in table.discrete_columns}
        self.values: Dict[str, np.ndarray] = {c: table.values(c) for c in table.continuous_columns}

    def split_parents(self, parents: Sequence[str]) -> Tuple[List[str], List[str]]:
        """(discrete parents, continuous parents), each in column order"""
        ordered = sorted(parents, key=self.order.__getitem__)
        disc = [p for p in ordered if self.kinds[p] == NodeKind.DISCRETE]
        cont = [p for p in ordered if self.kinds[p] == NodeKind.CONTINUOUS]
        return disc, cont

    def configurations(self, discrete_parents: Sequence[str]) -> Tuple[np.ndarray, Tuple[int, ...]]:
        """Configuration index per row and the level counts of each parent"""
        dims = tuple(len(self.levels[p]) for p in discrete_parents)
        if not discrete_parents:
            return np.zeros(self.n, dtype=np.int64), dims
        return np.ravel_multi_index([self.codes[p] for p in discrete_parents], dims), dims

    def design(self, continuous_parents: Sequence[str], rows: Optional[np.ndarray] = None) -> np.ndarray:
        """Intercept column plus continuous parents"""
        n = self.n if rows is None else rows.size
        columns = [np.ones(n)]
        for p in continuous_parents:
            columns.append(self.values[p] if rows is None else self.values[p][rows])
        return np.column_stack(columns)


def config_label(parents: Sequence[str], levels: Dict[str, List], config: int) -> str:
    """Human-readable label such as 'AREA=NE, YEAR=2015'"""
    if not parents:
        return "(no discrete parents)"
    dims = tuple(len(levels[p]) for p in parents)
    codes = np.unravel_index(config, dims)
    return ", ".join(f"{p}={levels[p][c]}" for p, c in zip(parents, codes))


@dataclass
class LocalDiscrete:
    """Conditional probability table of a discrete node"""
    node: str
    parents: List[str]
    levels: List
    parent_levels: Dict[str, List]
    cpt: np.ndarray  # (configurations, levels), rows sum to 1
    warnings: List[str] = field(default_factory=list)

    @property
    def n_configs(self) -> int:
        return self.cpt.shape[0]

    @property
    def n_params(self) -> int:
        return self.n_configs * (len(self.levels) - 1)


@dataclass
class LocalGaussian:
    """One linear regression per configuration of the discrete parents"""
    node: str
    discrete_parents: List[str]
    continuous_parents: List[str]
    parent_levels: Dict[str, List]
    intercepts: np.ndarray  # (configurations,)
    coefficients: np.ndarray  # (configurations, continuous parents)
    variances: np.ndarray  # (configurations,)
    fitted: np.ndarray  # (configurations,) False -> pooled fallback
    pooled: Tuple[float, np.ndarray, float]  # intercept, coefficients, variance
    warnings: List[str] = field(default_factory=list)

    @property
    def parents(self) -> List[str]:
        return self.discrete_parents + self.continuous_parents

    @property
    def n_configs(self) -> int:
        return self.intercepts.shape[0]

    @property
    def n_params(self) -> int:
        return self.n_configs * (len(self.continuous_parents) + 2)

    def parameters(self, configs: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Per-row (intercept, coefficients, variance), pooled where unfitted"""
        intercepts = self.intercepts[configs].copy()
        coefs = self.coefficients[configs].copy()
        variances = self.variances[configs].copy()
        fallback = ~self.fitted[configs]
        if fallback.any():
            intercepts[fallback] = self.pooled[0]
            coefs[fallback] = self.pooled[1]
            variances[fallback] = self.pooled[2]
        return intercepts, coefs, variances

    def mean(self, configs: np.ndarray, x: np.ndarray) -> np.ndarray:
        """Conditional mean; x has one column per continuous parent"""
        intercepts, coefs, _ = self.parameters(configs)
        return intercepts + np.einsum("ij,ij->i", coefs, x) if x.size else intercepts


def gaussian_loglik(residuals: np.ndarray, variance: np.ndarray | float) -> float:
    return float(np.sum(-0.5 * (LOG_2PI + np.log(variance)) - residuals ** 2 / (2.0 * variance)))


def _least_squares(design: np.ndarray, y: np.ndarray) -> Tuple[np.ndarray, float, bool]:
    """OLS via lstsq (least-norm when rank deficient); returns (beta, rss, full_rank)"""
    beta, _, rank, _ = np.linalg.lstsq(design, y, rcond=None)
    residuals = y - design @ beta
    return beta, float(residuals @ residuals), rank == design.shape[1]


# === Fitting
class LocalFitter:
    """
    Estimates local distributions by maximum likelihood.

    Modes:
    - strict: under-populated configurations raise FitError
    - lenient: they fall back to the pooled regression / marginal frequencies
    - score: they make the local score -inf (see local_loglik)
    """

    def __init__(
        self,
        data: DataMatrix,
        laplace: float = 0.0,
        variance_floor: Optional[float] = None,
        collinearity: Optional[str] = None,
    ):
        self.data = data
        self.laplace = laplace
        self.variance_floor = settings.VARIANCE_FLOOR if variance_floor is None else variance_floor
        self.collinearity = collinearity or settings.COLLINEARITY_POLICY

    def fit(self, node: str, parents: Sequence[str], strict: bool = True):
        """Fit node | parents; returns (LocalDiscrete | LocalGaussian, loglik)"""
        disc, cont = self.data.split_parents(parents)
        if self.data.kinds[node] == NodeKind.DISCRETE:
            if cont:
                raise FitError(f"Discrete node '{node}' cannot have continuous parents {cont}")
            return self._fit_discrete(node, disc, strict)
        return self._fit_gaussian(node, disc, cont, strict)

    def _fit_discrete(self, node: str, parents: List[str], strict: bool):
        data = self.data
        configs, dims = data.configurations(parents)
        q = int(np.prod(dims)) if dims else 1
        c = len(data.levels[node])
        codes = data.codes[node]
        counts = np.bincount(configs * c + codes, minlength=q * c).reshape(q, c).astype(float)
        warnings: List[str] = []

        smoothed = counts + self.laplace
        denom = smoothed.sum(axis=1, keepdims=True)
        cpt = np.divide(smoothed, denom, out=np.zeros_like(smoothed), where=denom > 0)
        empty = np.flatnonzero(denom[:, 0] == 0)
        if empty.size:
            labels = [config_label(parents, data.levels, int(j)) for j in empty]
            if strict:
                raise FitError(f"Node '{node}': no observations for configuration {labels[0]}")
            marginal = np.bincount(codes, minlength=c) / data.n
            cpt[empty] = marginal
            warnings.extend(f"{node}: empty configuration {lab} uses marginal frequencies" for lab in labels)
            logger.warning(f"{node}: {empty.size} empty CPT rows replaced by marginal frequencies")

        with np.errstate(divide="ignore"):
            log_cpt = np.log(cpt)
        loglik = float(np.multiply(counts, log_cpt, out=np.zeros_like(counts), where=counts > 0).sum())
        local = LocalDiscrete(
            node=node,
            parents=parents,
            levels=list(data.levels[node]),
            parent_levels={p: list(data.levels[p]) for p in parents},
            cpt=cpt,
            warnings=warnings,
        )
        return local, loglik

    def _solve(self, node: str, design: np.ndarray, y: np.ndarray, where: str, warnings: List[str]):
        beta, rss, full_rank = _least_squares(design, y)
        if not full_rank:
            message = f"{node}: collinear continuous parents ({where})"
            if self.collinearity == "raise":
                raise CollinearityError(message)
            warnings.append(f"{message}; least-norm solution used")
            logger.warning(message)
        variance = max(rss / y.size, self.variance_floor)
        return beta, variance

    def _fit_gaussian(self, node: str, disc: List[str], cont: List[str], strict: bool):
        data = self.data
        configs, dims = data.configurations(disc)
        q = int(np.prod(dims)) if dims else 1
        p = len(cont)
        y = data.values[node]
        warnings: List[str] = []

        pooled_beta, pooled_var = self._solve(node, data.design(cont), y, "pooled", warnings)
        intercepts = np.zeros(q)
        coefs = np.zeros((q, p))
        variances = np.ones(q)
        fitted = np.zeros(q, dtype=bool)

        for j in range(q):
            rows = np.flatnonzero(configs == j)
            if rows.size < p + 2:
                label = config_label(disc, data.levels, j)
                if strict:
                    raise FitError(
                        f"Node '{node}': configuration {label} has {rows.size} rows, needs at least {p + 2}"
                    )
                if rows.size:
                    warnings.append(f"{node}: configuration {label} ({rows.size} rows) uses the pooled regression")
                continue
            beta, variance = self._solve(
                node, data.design(cont, rows), y[rows], config_label(disc, data.levels, j), warnings
            )
            intercepts[j], coefs[j], variances[j] = beta[0], beta[1:], variance
            fitted[j] = True

        local = LocalGaussian(
            node=node,
            discrete_parents=disc,
            continuous_parents=cont,
            parent_levels={d: list(data.levels[d]) for d in disc},
            intercepts=intercepts,
            coefficients=coefs,
            variances=variances,
            fitted=fitted,
            pooled=(float(pooled_beta[0]), pooled_beta[1:], float(pooled_var)),
            warnings=warnings,
        )
        x = np.column_stack([data.values[c] for c in cont]) if cont else np.empty((data.n, 0))
        _, _, row_var = local.parameters(configs)
        loglik = gaussian_loglik(y - local.mean(configs, x), row_var)
        return local, loglik


def local_loglik(data: DataMatrix, node: str, parents: Sequence[str], variance_floor: float) -> Tuple[float, int]:
    """
    Maximized local log-likelihood and parameter count, for scoring.

    A continuous node whose discrete-parent configuration has fewer than
    p + 2 rows (p = continuous parents) scores -inf. Empty CPT rows of a
    discrete node contribute nothing to the likelihood.
    """
    disc, cont = data.split_parents(parents)
    configs, dims = data.configurations(disc)
    q = int(np.prod(dims)) if dims else 1

    if data.kinds[node] == NodeKind.DISCRETE:
        if cont:
            return -math.inf, 0
        c = len(data.levels[node])
        counts = np.bincount(configs * c + data.codes[node], minlength=q * c).reshape(q, c).astype(float)
        totals = counts.sum(axis=1, keepdims=True)
        # empty cells get ratio 1, so they add nothing
        ratio = np.divide(counts, totals, out=np.ones_like(counts), where=counts > 0)
        return float(np.sum(counts * np.log(ratio))), q * (c - 1)

    p = len(cont)
    y = data.values[node]
    loglik = 0.0
    for j in range(q):
        rows = np.flatnonzero(configs == j) if q > 1 else np.arange(data.n)
        if rows.size < p + 2:
            return -math.inf, q * (p + 2)
        _, rss, _ = _least_squares(data.design(cont, rows), y[rows])
        variance = max(rss / rows.size, variance_floor)
        loglik += -0.5 * rows.size * (LOG_2PI + math.log(variance)) - rss / (2.0 * variance)
    return loglik, q * (p + 2)
