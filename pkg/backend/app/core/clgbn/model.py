"""Fitted CLGBN: parameter estimation, likelihood, scores and prediction"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Dict, List, Mapping, Tuple, Union

import numpy as np

from app.core.clgbn.local import (
    LOG_2PI,
    DataMatrix,
    LocalDiscrete,
    LocalFitter,
    LocalGaussian,
)
from app.core.clgbn.scoring import penalty_per_param
from app.core.data.table import MixedTable
from app.core.exceptions import ArgumentError, EvaluationError, SchemaError, StructuralError
from app.core.graph.dag import Dag
from app.models.enums import NodeKind, ScoreCriterion

logger = logging.getLogger(__name__)

Local = Union[LocalDiscrete, LocalGaussian]


def check_clgbn_constraint(d: Dag) -> bool:
    """True iff no edge runs from a continuous node to a discrete one"""
    return not any(
        d.kind(u) == NodeKind.CONTINUOUS and d.kind(v) == NodeKind.DISCRETE
        for u, v in d.edges
    )


@dataclass
class ClgbnFit:
    """A DAG together with its maximum-likelihood local distributions"""
    dag: Dag
    locals: Dict[str, Local]
    local_logliks: Dict[str, float]
    n_obs: int
    warnings: List[str] = field(default_factory=list)

    @property
    def loglik(self) -> float:
        return float(sum(self.local_logliks.values()))

    @property
    def n_params(self) -> int:
        return sum(local.n_params for local in self.locals.values())

    def local_score(self, node: str, criterion: ScoreCriterion = ScoreCriterion.BIC) -> float:
        penalty = penalty_per_param(criterion, self.n_obs)
        return self.local_logliks[node] - penalty * self.locals[node].n_params

    def score(self, criterion: ScoreCriterion = ScoreCriterion.BIC) -> float:
        return bic(self) if criterion == ScoreCriterion.BIC else aic(self)

    @property
    def levels(self) -> Dict[str, List]:
        """Level dictionary of every discrete node"""
        return {
            name: local.levels
            for name, local in self.locals.items()
            if isinstance(local, LocalDiscrete)
        }


def _check_schema(d: Dag, t: MixedTable) -> None:
    missing = [v for v in d.names if v not in t.schema]
    if missing:
        raise SchemaError(f"Columns missing from table: {missing}", columns=missing)
    mismatched = [v for v in d.names if t.schema[v] != d.kind(v)]
    if mismatched:
        raise SchemaError(f"Node kinds disagree with table schema: {mismatched}", columns=mismatched)


def fit(
    d: Dag,
    t: MixedTable,
    strict: bool = True,
    laplace: float = 0.0,
    workers: int = 1,
) -> ClgbnFit:
    """
    Fit every local distribution of d on a complete table.

    Args:
        d: Network structure satisfying the CLGBN constraint
        t: Complete table whose schema covers d's nodes
        strict: Raise FitError on under-populated configurations instead
            of falling back to pooled estimates
        laplace: Pseudo-count added to every CPT cell
        workers: Threads used to fit nodes concurrently

    Returns:
        ClgbnFit
    """
    if not check_clgbn_constraint(d):
        bad = [(u, v) for u, v in d.edges if d.kind(u) == NodeKind.CONTINUOUS and d.kind(v) == NodeKind.DISCRETE]
        raise StructuralError(f"Continuous -> discrete edges are not allowed: {bad}")
    if laplace < 0:
        raise ArgumentError("laplace must be non-negative")
    _check_schema(d, t)

    data = DataMatrix(t)
    fitter = LocalFitter(data, laplace=laplace)

    def fit_node(v: str) -> Tuple[Local, float]:
        return fitter.fit(v, sorted(d.parents(v)), strict=strict)

    names = list(d.names)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(fit_node, names))
    else:
        results = [fit_node(v) for v in names]

    locals_ = {v: local for v, (local, _) in zip(names, results)}
    logliks = {v: ll for v, (_, ll) in zip(names, results)}
    warnings = [w for local, _ in results for w in local.warnings]
    result = ClgbnFit(dag=d.copy(), locals=locals_, local_logliks=logliks, n_obs=data.n, warnings=warnings)
    logger.debug(f"Fitted {len(names)} nodes: loglik={result.loglik:.4f}, params={result.n_params}")
    return result


# === Evaluation
class _Encoder:
    """Maps a table onto a fit's level dictionaries"""

    def __init__(self, f: ClgbnFit, t: MixedTable):
        if not t.is_complete:
            raise EvaluationError(f"Cannot evaluate a table with {t.n_missing} missing cells")
        _check_schema(f.dag, t)
        self.n = t.n_rows
        self.codes: Dict[str, np.ndarray] = {}
        self.values: Dict[str, np.ndarray] = {}
        self.levels = f.levels
        for name in f.dag.names:
            if f.dag.kind(name) == NodeKind.CONTINUOUS:
                self.values[name] = t.values(name)
                continue
            index = {str(level): i for i, level in enumerate(self.levels[name])}
            table_levels = t.levels(name)
            unknown = [lv for lv in table_levels if str(lv) not in index]
            codes = t.codes(name)
            if unknown:
                present = set(np.unique(codes))
                seen = [lv for i, lv in enumerate(table_levels) if lv in unknown and i in present]
                if seen:
                    raise EvaluationError(f"{name}: level(s) {seen} not seen during fitting")
            lookup = np.array([index.get(str(lv), -1) for lv in table_levels], dtype=np.int64)
            self.codes[name] = lookup[codes] if codes.size else codes

    def configs(self, parents: List[str]) -> np.ndarray:
        if not parents:
            return np.zeros(self.n, dtype=np.int64)
        dims = tuple(len(self.levels[p]) for p in parents)
        return np.ravel_multi_index([self.codes[p] for p in parents], dims)

    def matrix(self, parents: List[str]) -> np.ndarray:
        if not parents:
            return np.empty((self.n, 0))
        return np.column_stack([self.values[p] for p in parents])


def row_log_densities(f: ClgbnFit, t: MixedTable) -> np.ndarray:
    """Log joint density of each row under the factorization"""
    enc = _Encoder(f, t)
    total = np.zeros(enc.n)
    for name, local in f.locals.items():
        if isinstance(local, LocalDiscrete):
            with np.errstate(divide="ignore"):
                total += np.log(local.cpt[enc.configs(local.parents), enc.codes[name]])
            continue
        configs = enc.configs(local.discrete_parents)
        mean = local.mean(configs, enc.matrix(local.continuous_parents))
        _, _, variance = local.parameters(configs)
        total += -0.5 * (LOG_2PI + np.log(variance)) - (enc.values[name] - mean) ** 2 / (2.0 * variance)
    return total


def log_likelihood(f: ClgbnFit, t: MixedTable) -> float:
    """Sum over rows of the log joint density"""
    return float(row_log_densities(f, t).sum())


def bic(f: ClgbnFit) -> float:
    """loglik - (k/2) ln n"""
    return f.loglik - penalty_per_param(ScoreCriterion.BIC, f.n_obs) * f.n_params


def aic(f: ClgbnFit) -> float:
    """loglik - k"""
    return f.loglik - penalty_per_param(ScoreCriterion.AIC, f.n_obs) * f.n_params


# === Prediction
def predict_column(f: ClgbnFit, v: str, t: MixedTable) -> Tuple[np.ndarray, np.ndarray]:
    """
    Conditional means of continuous node v for every row of t.

    Returns (predictions, fallback) where fallback marks rows whose
    discrete-parent configuration had no fitted regression and used the
    pooled one.
    """
    local = _gaussian(f, v)
    enc = _Encoder(f, t)
    configs = enc.configs(local.discrete_parents)
    predictions = local.mean(configs, enc.matrix(local.continuous_parents))
    return predictions, ~local.fitted[configs]


def predict_node(f: ClgbnFit, v: str, row: Mapping[str, Any]) -> float:
    """Conditional mean of v given its parents' values in row"""
    local = _gaussian(f, v)
    missing = [p for p in local.parents if p not in row]
    if missing:
        raise ArgumentError(f"Row lacks parents of '{v}': {missing}")

    config = 0
    for p in local.discrete_parents:
        levels = [str(level) for level in local.parent_levels[p]]
        value = str(row[p])
        if value not in levels:
            raise EvaluationError(f"{p}: level '{value}' not seen during fitting")
        config = config * len(levels) + levels.index(value)

    x = np.array([[float(row[p]) for p in local.continuous_parents]]) if local.continuous_parents else np.empty((1, 0))
    if not local.fitted[config]:
        logger.warning(f"{v}: unseen parent configuration, using pooled regression")
    return float(local.mean(np.array([config]), x)[0])


def _gaussian(f: ClgbnFit, v: str) -> LocalGaussian:
    if v not in f.locals:
        raise ArgumentError(f"Unknown node '{v}'")
    local = f.locals[v]
    if not isinstance(local, LocalGaussian):
        raise ArgumentError(f"'{v}' is not a continuous node")
    return local
