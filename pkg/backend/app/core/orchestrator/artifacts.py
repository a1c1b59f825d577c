"""Reading and writing run artifacts"""

import json
import logging
from pathlib import Path
from typing import List, Optional, Tuple, Union

from pydantic import BaseModel

from app.config.run_config import RunConfig, write_resolved
from app.core.averaging.aggregate import AveragedGraph
from app.core.averaging.writers import AveragedDocument, from_document
from app.core.exceptions import SchemaError
from app.core.graph.dag import Dag
from app.models.schemas import ImputationReport, NodeId, SearchTrace, TransformSpec

logger = logging.getLogger(__name__)


class StructureDocument(BaseModel):
    """A learned DAG with its search history"""
    nodes: List[NodeId]
    edges: List[Tuple[str, str]]
    trace: Optional[SearchTrace] = None


class PreprocessDocument(BaseModel):
    """Fitted transforms and the imputation report"""
    transforms: List[TransformSpec]
    imputation: ImputationReport


class RunSummary(BaseModel):
    """Goodness of fit of one run, read back by the compare stage"""
    label: str
    loglik: float
    bic: float
    aic: float
    n_params: int
    n_obs: int
    structure: str
    fit_warnings: List[str] = []


def prepare_output(directory: Path, cfg: Optional[RunConfig] = None) -> Path:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    if cfg is not None:
        write_resolved(cfg, directory)
    return directory


def write_json(path: Path, payload: BaseModel, cfg: Optional[RunConfig] = None) -> None:
    """Dump a model, embedding the resolved run configuration first"""
    body = payload.model_dump(mode="json")
    if cfg is not None:
        body = {"run": cfg.resolved(), **body}
    Path(path).write_text(json.dumps(body, indent=2) + "\n")
    logger.debug(f"Wrote {path}")


def read_structure(path: Path) -> Union[Dag, AveragedGraph]:
    """Load dag.json (a Dag) or averaged.json (an AveragedGraph)"""
    path = Path(path)
    try:
        body = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise SchemaError(f"Cannot read structure file {path}: {exc}") from exc
    if "strengths" in body:
        return from_document(AveragedDocument.model_validate(body))
    doc = StructureDocument.model_validate(body)
    return Dag(doc.nodes, doc.edges)
