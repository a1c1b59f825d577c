"""Strength table, JSON and DOT outputs of an averaged network"""

import logging
from pathlib import Path
from typing import Dict, List, Optional, Tuple

import pandas as pd
from pydantic import BaseModel

from app.core.averaging.aggregate import AveragedGraph
from app.core.graph.dag import Pdag
from app.core.graph.dot import to_dot
from app.models.schemas import AveragingConfig, EdgeStrength, NodeId

logger = logging.getLogger(__name__)

STRENGTH_COLUMNS = ["from", "to", "strength", "direction"]


class AveragedDocument(BaseModel):
    """JSON form of an AveragedGraph"""
    nodes: List[NodeId]
    directed: List[Tuple[str, str]]
    undirected: List[Tuple[str, str]]
    strengths: List[EdgeStrength]
    config: AveragingConfig
    replicates: int
    resampling: str = "plain row bootstrap (not stratified)"


def strength_frame(averaged: AveragedGraph) -> pd.DataFrame:
    """One row per observed pair; direction is the from->to fraction"""
    records = [
        {"from": r.source, "to": r.target, "strength": r.strength, "direction": r.direction}
        for r in averaged.strengths
    ]
    return pd.DataFrame.from_records(records, columns=STRENGTH_COLUMNS)


def write_strengths(averaged: AveragedGraph, path: Path) -> None:
    strength_frame(averaged).to_csv(path, index=False, float_format="%.6f")
    logger.info(f"Wrote {len(averaged.strengths)} edge strengths to {path}")


def to_document(averaged: AveragedGraph) -> AveragedDocument:
    pdag = averaged.pdag
    return AveragedDocument(
        nodes=list(pdag.nodes),
        directed=pdag.directed_edges,
        undirected=pdag.undirected_edges,
        strengths=averaged.strengths,
        config=averaged.config,
        replicates=averaged.replicates,
    )


def write_json(averaged: AveragedGraph, path: Path) -> None:
    Path(path).write_text(to_document(averaged).model_dump_json(indent=2))


def averaged_dot(
    averaged: AveragedGraph,
    node_colors: Optional[Dict[str, str]] = None,
    comment: Optional[str] = None,
) -> str:
    """DOT text with each edge labelled by its strength"""
    labels = {}
    for row in averaged.retained():
        label = f"{row.strength:.2f}"
        labels[(row.source, row.target)] = label
        labels[(row.target, row.source)] = label
    return to_dot(averaged.pdag, name="averaged", edge_labels=labels, node_colors=node_colors, comment=comment)


def write_dot(averaged: AveragedGraph, path: Path, node_colors: Optional[Dict[str, str]] = None) -> None:
    Path(path).write_text(averaged_dot(averaged, node_colors=node_colors))


def from_document(doc: AveragedDocument) -> AveragedGraph:
    pdag = Pdag(doc.nodes, directed=doc.directed, undirected=doc.undirected)
    return AveragedGraph(pdag=pdag, strengths=list(doc.strengths), config=doc.config, replicates=doc.replicates)


def read_json(path: Path) -> AveragedGraph:
    return from_document(AveragedDocument.model_validate_json(Path(path).read_text()))
