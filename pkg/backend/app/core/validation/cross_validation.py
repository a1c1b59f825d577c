"""k-fold cross-validated predictive accuracy of continuous nodes"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple, Union

import numpy as np
from sklearn.model_selection import KFold

from app.core.averaging.aggregate import acyclic_completion
from app.core.averaging.bootstrap import learn_averaged
from app.core.clgbn.model import fit, predict_column
from app.core.data.table import MixedTable
from app.core.exceptions import ArgumentError
from app.core.graph.dag import Dag
from app.core.search.constraints import ConstraintSet
from app.core.search.hill_climb import hill_climb
from app.models.schemas import AveragingConfig, CvConfig, CvReport, SearchConfig

logger = logging.getLogger(__name__)


def kfold_split(n: int, k: int, seed: int = 0) -> List[np.ndarray]:
    """
    Partition range(n) into k shuffled folds whose sizes differ by at most one.

    Indices are 0-based and sorted within each fold.
    """
    if k < 2:
        raise ArgumentError(f"Need at least 2 folds, got {k}")
    if k > n:
        raise ArgumentError(f"Cannot split {n} rows into {k} folds")
    splitter = KFold(n_splits=k, shuffle=True, random_state=seed)
    return [np.sort(test) for _, test in splitter.split(np.zeros((n, 1)))]


@dataclass
class LearningSpec:
    """How to relearn a structure on each training fold"""
    constraints: ConstraintSet = field(default_factory=ConstraintSet)
    search: SearchConfig = field(default_factory=SearchConfig)
    averaging: Optional[AveragingConfig] = None
    average_in_cv: bool = False

    def learn(self, t: MixedTable) -> Dag:
        if self.average_in_cv and self.averaging is not None:
            averaged = learn_averaged(t, self.constraints, self.search, self.averaging)
            return acyclic_completion(averaged)
        dag, _ = hill_climb(t, self.constraints, self.search)
        return dag


def _standardize(train: MixedTable, test: MixedTable) -> Tuple[MixedTable, MixedTable]:
    """z-score continuous columns with training-fold statistics"""
    for column in train.continuous_columns:
        values = train.values(column)
        mean, std = float(values.mean()), float(values.std())
        if std == 0.0:
            std = 1.0
        train = train.with_values(column, (values - mean) / std)
        test = test.with_values(column, (test.values(column) - mean) / std)
    return train, test


def cross_validate(
    t: MixedTable,
    model: Union[Dag, LearningSpec],
    cfg: Optional[CvConfig] = None,
    workers: int = 1,
) -> CvReport:
    """
    Posterior mean squared error of every continuous node.

    Each fold is predicted from a model fitted on the remaining folds;
    a fixed Dag is only refitted, a LearningSpec relearns the structure
    first. Predictions use the node's parents (its local regression).

    Args:
        t: Complete table
        model: Fixed structure or learning recipe
        cfg: Folds, fold seed and standardization
        workers: Threads used to process folds concurrently

    Returns:
        CvReport
    """
    cfg = cfg or CvConfig()
    if not t.is_complete:
        raise ArgumentError("Cross-validation needs a complete table; run preprocessing first")
    targets = t.continuous_columns
    if not targets:
        raise ArgumentError("Cross-validation needs at least one continuous node")
    folds = kfold_split(t.n_rows, cfg.folds, cfg.seed)
    everything = np.arange(t.n_rows)

    def run_fold(i: int) -> Tuple[Dict[str, float], List[str]]:
        held_out = folds[i]
        train, test = t.take(np.setdiff1d(everything, held_out)), t.take(held_out)
        if cfg.standardize:
            train, test = _standardize(train, test)
        dag = model.learn(train) if isinstance(model, LearningSpec) else model
        fitted = fit(dag, train, strict=False)
        errors: Dict[str, float] = {}
        flagged: List[str] = []
        for v in targets:
            predictions, fallback = predict_column(fitted, v, test)
            errors[v] = float(np.sum((test.values(v) - predictions) ** 2))
            if fallback.any():
                flagged.append(f"fold {i + 1}: {v} ({int(fallback.sum())} rows)")
        return errors, flagged

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run_fold, range(len(folds))))
    else:
        results = [run_fold(i) for i in range(len(folds))]

    per_node = {v: sum(errors[v] for errors, _ in results) / t.n_rows for v in targets}
    flagged = [flag for _, flags in results for flag in flags]
    if flagged:
        logger.warning(f"{len(flagged)} fold/node pairs used the pooled regression")
    report = CvReport(
        per_node_mse=per_node,
        posterior_mse=float(np.mean(list(per_node.values()))),
        fold_seed=cfg.seed,
        folds=cfg.folds,
        mode="relearn" if isinstance(model, LearningSpec) else "fixed",
        flagged=flagged,
    )
    logger.info(f"{cfg.folds}-fold CV ({report.mode}): posterior MSE {report.posterior_mse:.6f}")
    return report
