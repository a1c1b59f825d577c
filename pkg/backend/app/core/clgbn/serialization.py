"""JSON documents for fitted networks"""

import logging
from pathlib import Path
from typing import Dict, List, Literal, Tuple, Union

import numpy as np
from pydantic import BaseModel, Field

from app.core.clgbn.local import LocalDiscrete, LocalGaussian
from app.core.clgbn.model import ClgbnFit
from app.core.graph.dag import Dag
from app.models.schemas import NodeId

logger = logging.getLogger(__name__)


class DiscreteDocument(BaseModel):
    type: Literal["discrete"] = "discrete"
    parents: List[str]
    levels: List[str]
    parent_levels: Dict[str, List[str]]
    cpt: List[List[float]] = Field(description="One probability row per parent configuration")


class GaussianDocument(BaseModel):
    type: Literal["gaussian"] = "gaussian"
    discrete_parents: List[str]
    continuous_parents: List[str]
    parent_levels: Dict[str, List[str]]
    intercepts: List[float]
    coefficients: List[List[float]]
    variances: List[float]
    fitted: List[bool]
    pooled_intercept: float
    pooled_coefficients: List[float]
    pooled_variance: float


class FitDocument(BaseModel):
    """Serialized ClgbnFit"""
    nodes: List[NodeId]
    edges: List[Tuple[str, str]]
    locals: Dict[str, Union[DiscreteDocument, GaussianDocument]]
    local_logliks: Dict[str, float]
    loglik: float
    n_params: int
    n_obs: int
    warnings: List[str] = Field(default_factory=list)


def _levels(levels) -> List[str]:
    return [str(level) for level in levels]


def to_document(f: ClgbnFit) -> FitDocument:
    locals_: Dict[str, Union[DiscreteDocument, GaussianDocument]] = {}
    for name, local in f.locals.items():
        if isinstance(local, LocalDiscrete):
            locals_[name] = DiscreteDocument(
                parents=local.parents,
                levels=_levels(local.levels),
                parent_levels={p: _levels(v) for p, v in local.parent_levels.items()},
                cpt=local.cpt.tolist(),
            )
        else:
            locals_[name] = GaussianDocument(
                discrete_parents=local.discrete_parents,
                continuous_parents=local.continuous_parents,
                parent_levels={p: _levels(v) for p, v in local.parent_levels.items()},
                intercepts=local.intercepts.tolist(),
                coefficients=local.coefficients.tolist(),
                variances=local.variances.tolist(),
                fitted=local.fitted.tolist(),
                pooled_intercept=local.pooled[0],
                pooled_coefficients=np.asarray(local.pooled[1]).tolist(),
                pooled_variance=local.pooled[2],
            )
    return FitDocument(
        nodes=list(f.dag.nodes),
        edges=f.dag.edges,
        locals=locals_,
        local_logliks=f.local_logliks,
        loglik=f.loglik,
        n_params=f.n_params,
        n_obs=f.n_obs,
        warnings=f.warnings,
    )


def from_document(doc: FitDocument) -> ClgbnFit:
    dag = Dag(doc.nodes, doc.edges)
    locals_ = {}
    for name, local in doc.locals.items():
        if isinstance(local, DiscreteDocument):
            locals_[name] = LocalDiscrete(
                node=name,
                parents=list(local.parents),
                levels=list(local.levels),
                parent_levels=dict(local.parent_levels),
                cpt=np.array(local.cpt, dtype=float),
            )
        else:
            p = len(local.continuous_parents)
            locals_[name] = LocalGaussian(
                node=name,
                discrete_parents=list(local.discrete_parents),
                continuous_parents=list(local.continuous_parents),
                parent_levels=dict(local.parent_levels),
                intercepts=np.array(local.intercepts, dtype=float),
                coefficients=np.array(local.coefficients, dtype=float).reshape(len(local.intercepts), p),
                variances=np.array(local.variances, dtype=float),
                fitted=np.array(local.fitted, dtype=bool),
                pooled=(
                    local.pooled_intercept,
                    np.array(local.pooled_coefficients, dtype=float),
                    local.pooled_variance,
                ),
            )
    return ClgbnFit(
        dag=dag,
        locals=locals_,
        local_logliks=dict(doc.local_logliks),
        n_obs=doc.n_obs,
        warnings=list(doc.warnings),
    )


def save_fit(f: ClgbnFit, path: Path) -> None:
    Path(path).write_text(to_document(f).model_dump_json(indent=2))
    logger.info(f"Wrote fitted model to {path}")


def load_fit(path: Path) -> ClgbnFit:
    return from_document(FitDocument.model_validate_json(Path(path).read_text()))
