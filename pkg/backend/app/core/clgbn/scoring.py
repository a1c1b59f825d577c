"""Decomposable network scores (larger is better)"""

import logging
import math
from typing import Iterable, Optional

from app.config import settings
from app.core.cache import LocalScoreCache
from app.core.clgbn.local import DataMatrix, local_loglik
from app.core.data.table import MixedTable
from app.core.exceptions import ArgumentError
from app.core.graph.dag import Dag
from app.models.enums import ScoreCriterion

logger = logging.getLogger(__name__)


def penalty_per_param(criterion: ScoreCriterion, n_obs: int) -> float:
    """BIC charges ln(n)/2 per parameter, AIC charges 1"""
    if n_obs < 1:
        raise ArgumentError("Scores need at least one observation")
    if criterion == ScoreCriterion.BIC:
        return 0.5 * math.log(n_obs)
    return 1.0


class LocalScorer:
    """
    Scores node | parents terms on one complete dataset.

    The network score is the sum of the local terms, so the search only
    rescores the nodes whose parent set changed. Results are memoized in
    a LocalScoreCache; the scorer is safe to share between threads.
    """

    def __init__(
        self,
        table: MixedTable,
        criterion: ScoreCriterion = ScoreCriterion.BIC,
        variance_floor: Optional[float] = None,
        cache: Optional[LocalScoreCache] = None,
    ):
        self.data = DataMatrix(table)
        self.criterion = criterion
        self.variance_floor = settings.VARIANCE_FLOOR if variance_floor is None else variance_floor
        self.penalty = penalty_per_param(criterion, self.data.n)
        self.cache = cache if cache is not None else LocalScoreCache()

    @property
    def n_obs(self) -> int:
        return self.data.n

    def local_score(self, node: str, parents: Iterable[str]) -> float:
        key = frozenset(parents)
        cached = self.cache.get(node, key)
        if cached is not None:
            return cached
        loglik, n_params = local_loglik(self.data, node, sorted(key), self.variance_floor)
        score = loglik - self.penalty * n_params if math.isfinite(loglik) else -math.inf
        self.cache.set(node, key, score)
        return score

    def score(self, dag: Dag) -> float:
        return sum(self.local_score(v, dag.parents(v)) for v in dag.names)
