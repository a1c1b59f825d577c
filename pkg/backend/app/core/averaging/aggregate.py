"""Arc strengths, direction confidences and the averaged network"""

import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from app.core.exceptions import AveragingError
from app.core.graph.dag import Dag, Pdag
from app.models.enums import NodeKind
from app.models.schemas import AveragingConfig, EdgeStrength

logger = logging.getLogger(__name__)

# Absorbs rounding when a fraction sits exactly on a threshold
THRESHOLD_TOLERANCE = 1e-12


@dataclass(frozen=True)
class AveragedGraph:
    """Thresholded consensus of bootstrap replicates"""
    pdag: Pdag
    strengths: List[EdgeStrength]
    config: AveragingConfig
    replicates: int

    def strength(self, a: str, b: str) -> float:
        row = self.lookup(a, b)
        return row.strength if row is not None else 0.0

    def direction(self, a: str, b: str) -> Optional[float]:
        """Fraction of edge-containing replicates oriented a->b"""
        row = self.lookup(a, b)
        if row is None:
            return None
        return row.direction if row.source == a else row.reverse_direction

    def lookup(self, a: str, b: str) -> Optional[EdgeStrength]:
        for row in self.strengths:
            if {row.source, row.target} == {a, b}:
                return row
        return None

    def retained(self) -> List[EdgeStrength]:
        return [row for row in self.strengths if self.pdag.adjacent(row.source, row.target)]


def _orient(row: EdgeStrength, threshold: float) -> Optional[Tuple[str, str]]:
    if row.direction is None:
        return None
    if row.direction >= threshold - THRESHOLD_TOLERANCE:
        return row.source, row.target
    if row.reverse_direction >= threshold - THRESHOLD_TOLERANCE:
        return row.target, row.source
    return None


def edge_strengths(dags: Sequence[Dag]) -> List[EdgeStrength]:
    """Strength and direction of every pair present in at least one replicate"""
    if not dags:
        raise AveragingError("No replicate structures to average")
    reference = dags[0]
    for d in dags[1:]:
        if d.nodes != reference.nodes:
            raise AveragingError("Replicate structures have different node sets")

    present: Dict[Tuple[str, str], int] = {}
    forward: Dict[Tuple[str, str], int] = {}
    for d in dags:
        for u, v in d.edges:
            pair = (u, v) if reference.index(u) < reference.index(v) else (v, u)
            present[pair] = present.get(pair, 0) + 1
            forward[pair] = forward.get(pair, 0) + (pair[0] == u)

    m = len(dags)
    rows = [
        EdgeStrength(source=a, target=b, strength=count / m, direction=forward[(a, b)] / count)
        for (a, b), count in present.items()
    ]
    rows.sort(key=lambda r: (reference.index(r.source), reference.index(r.target)))
    return rows


def average_structures(dags: Sequence[Dag], cfg: AveragingConfig) -> AveragedGraph:
    """
    Keep pairs with strength >= strength_threshold; orient them when one
    direction reaches direction_threshold, otherwise leave them undirected.
    """
    strengths = edge_strengths(dags)
    directed, undirected = [], []
    for row in strengths:
        if row.strength < cfg.strength_threshold - THRESHOLD_TOLERANCE:
            continue
        arc = _orient(row, cfg.direction_threshold)
        if arc is None:
            undirected.append((row.source, row.target))
        else:
            directed.append(arc)

    pdag = Pdag(dags[0].nodes, directed=directed, undirected=undirected)
    logger.info(
        f"Averaged {len(dags)} replicates: {len(directed)} directed and "
        f"{len(undirected)} undirected edges of {len(strengths)} observed pairs"
    )
    return AveragedGraph(pdag=pdag, strengths=strengths, config=cfg, replicates=len(dags))


def acyclic_completion(averaged: AveragedGraph) -> Dag:
    """
    Post-processing: turn the averaged network into a DAG.

    Edges are inserted strongest first (ties in node order). Directed edges
    keep their orientation, undirected ones take their majority direction;
    either flips when its orientation would close a cycle or point from a
    continuous to a discrete node. Edges with no legal orientation are
    dropped with a warning.
    """
    pdag = averaged.pdag
    dag = Dag(pdag.nodes)
    order = sorted(
        averaged.retained(),
        key=lambda r: (-r.strength, pdag.index(r.source), pdag.index(r.target)),
    )

    def legal(u: str, v: str) -> bool:
        if pdag.kind(u) == NodeKind.CONTINUOUS and pdag.kind(v) == NodeKind.DISCRETE:
            return False
        return not dag.would_create_cycle(u, v)

    for row in order:
        a, b = row.source, row.target
        if pdag.is_directed(b, a) or (pdag.is_undirected(a, b) and (row.direction or 0.0) < 0.5):
            preferred = [(b, a), (a, b)]
        else:
            preferred = [(a, b), (b, a)]
        for u, v in preferred:
            if legal(u, v):
                dag.add_edge(u, v)
                break
        else:
            logger.warning(f"Dropped {a}-{b}: no orientation keeps the network acyclic")
    return dag
