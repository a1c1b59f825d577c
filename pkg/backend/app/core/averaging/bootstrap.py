"""Bootstrap replicates of the structure search"""

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional

import numpy as np

from app.core.averaging.aggregate import AveragedGraph, average_structures
from app.core.data.table import MixedTable
from app.core.exceptions import DegenerateInputError
from app.core.graph.dag import Dag
from app.core.search.constraints import ConstraintSet
from app.core.search.hill_climb import hill_climb
from app.models.schemas import AveragingConfig, SearchConfig

logger = logging.getLogger(__name__)


def replicate_rng(seed: int) -> np.random.Generator:
    """Counter-based stream so replicate i depends only on seed + i"""
    return np.random.Generator(np.random.Philox(seed))


def bootstrap_resample(t: MixedTable, seed: int) -> MixedTable:
    """n rows drawn uniformly with replacement"""
    if t.n_rows < 1:
        raise DegenerateInputError("Cannot resample an empty table")
    rows = replicate_rng(seed).integers(0, t.n_rows, size=t.n_rows)
    return t.take(rows)


def learn_replicates(
    t: MixedTable,
    constraints: ConstraintSet,
    search_cfg: SearchConfig,
    avg_cfg: AveragingConfig,
    workers: int = 1,
) -> List[Dag]:
    """
    One Hill-Climbing run per bootstrap resample.

    Replicate i resamples with seed avg_cfg.seed + i and searches with seed
    search_cfg.seed + i, so the output does not depend on workers.
    """
    constraints.validate(t.nodes)

    def replicate(i: int) -> Dag:
        sample = bootstrap_resample(t, avg_cfg.seed + i)
        cfg = search_cfg.model_copy(update={"seed": search_cfg.seed + i})
        dag, _ = hill_climb(sample, constraints, cfg)
        return dag

    indices = range(avg_cfg.replicates)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            dags = list(pool.map(replicate, indices))
    else:
        dags = [replicate(i) for i in indices]
    logger.info(f"Learned {len(dags)} bootstrap replicates")
    return dags


def learn_averaged(
    t: MixedTable,
    constraints: Optional[ConstraintSet] = None,
    search_cfg: Optional[SearchConfig] = None,
    avg_cfg: Optional[AveragingConfig] = None,
    workers: int = 1,
) -> AveragedGraph:
    """Resample, relearn and average into a partially directed network"""
    constraints = constraints or ConstraintSet()
    search_cfg = search_cfg or SearchConfig()
    avg_cfg = avg_cfg or AveragingConfig()
    dags = learn_replicates(t, constraints, search_cfg, avg_cfg, workers=workers)
    return average_structures(dags, avg_cfg)
