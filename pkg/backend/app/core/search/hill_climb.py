"""Greedy Hill-Climbing over DAGs with random restarts"""

import logging
import math
from typing import Dict, List, Optional, Tuple

import networkx as nx
import numpy as np

from app.core.clgbn.scoring import LocalScorer
from app.core.data.table import MixedTable
from app.core.exceptions import SearchError
from app.core.graph.dag import Dag
from app.core.search.constraints import ConstraintSet
from app.models.enums import MoveKind
from app.models.schemas import Move, MoveRecord, RestartRecord, SearchConfig, SearchTrace

logger = logging.getLogger(__name__)

# Accepted moves must beat this; keeps rounding noise from flipping covered edges
MIN_IMPROVEMENT = 1e-9

# Relative gap a later move needs over the best so far; smaller gaps are ties
TIE_TOLERANCE = 1e-7


def legal_moves(d: Dag, constraints: ConstraintSet, max_parents: Optional[int] = None) -> List[Move]:
    """
    Every single-edge edit of d that keeps it a legal network.

    A legal graph is acyclic, has no continuous -> discrete edge, avoids the
    blacklist and keeps every whitelist adjacency (directed entries also
    keep their direction). Moves come in tie-break order: source, target,
    then add < delete < reverse.
    """
    kinds = {n.name: n.kind for n in d.nodes}
    graph = d.to_networkx()
    below = {v: nx.descendants(graph, v) for v in d.names}

    def has_room(v: str) -> bool:
        return max_parents is None or graph.in_degree(v) < max_parents

    moves: List[Move] = []
    for u in d.names:
        for v in d.names:
            if u == v:
                continue
            if graph.has_edge(u, v):
                if not constraints.is_pinned(u, v):
                    moves.append(Move(kind=MoveKind.DELETE, source=u, target=v))
                # u->v reversal closes a cycle iff another directed path u ~> v exists
                if (
                    not constraints.is_fixed(u, v)
                    and constraints.allows(v, u, kinds)
                    and has_room(u)
                    and not any(v in below[c] for c in graph.successors(u) if c != v)
                ):
                    moves.append(Move(kind=MoveKind.REVERSE, source=u, target=v))
            elif not graph.has_edge(v, u):
                if constraints.allows(u, v, kinds) and u not in below[v] and has_room(v):
                    moves.append(Move(kind=MoveKind.ADD, source=u, target=v))
    return moves


def apply_move(d: Dag, move: Move) -> None:
    if move.kind == MoveKind.ADD:
        d.add_edge(move.source, move.target)
    elif move.kind == MoveKind.DELETE:
        d.remove_edge(move.source, move.target)
    else:
        d.reverse_edge(move.source, move.target)


class HillClimber:
    """
    Score-based structure search.

    Each step scores every legal move through the decomposable local
    scores (only the nodes whose parent set changes are rescored) and
    applies the best strictly improving one. Deltas within TIE_TOLERANCE
    (relative) of the best so far are ties and go to the first move in
    legal_moves order. After convergence, each restart perturbs the
    incumbent with random legal moves, climbs again and keeps the result
    if it scores higher.
    """

    def __init__(self, scorer: LocalScorer, constraints: ConstraintSet, config: SearchConfig):
        self.scorer = scorer
        self.constraints = constraints
        self.config = config

    def _local_scores(self, d: Dag) -> Dict[str, float]:
        return {v: self.scorer.local_score(v, d.parents(v)) for v in d.names}

    def delta(self, d: Dag, move: Move, local: Dict[str, float]) -> float:
        """Score change of a move; nan when both sides are -inf"""
        u, v = move.source, move.target
        pa_v = d.parents(v)
        if move.kind == MoveKind.ADD:
            return self.scorer.local_score(v, pa_v | {u}) - local[v]
        change = self.scorer.local_score(v, pa_v - {u}) - local[v]
        if move.kind == MoveKind.REVERSE:
            change += self.scorer.local_score(u, d.parents(u) | {v}) - local[u]
        return change

    def ascend(self, d: Dag, local: Dict[str, float]) -> List[MoveRecord]:
        """Climb in place until no legal move improves the score"""
        records: List[MoveRecord] = []
        while True:
            best: Optional[Move] = None
            best_delta = MIN_IMPROVEMENT
            for move in legal_moves(d, self.constraints, self.config.max_parents):
                change = self.delta(d, move, local)
                if best is None:
                    if change > best_delta:
                        best, best_delta = move, change
                elif change > best_delta + TIE_TOLERANCE * max(1.0, abs(best_delta)):
                    best, best_delta = move, change
            if best is None:
                return records
            apply_move(d, best)
            for node in {best.source, best.target}:
                local[node] = self.scorer.local_score(node, d.parents(node))
            records.append(MoveRecord(move=best, delta=best_delta))

    def perturb(self, d: Dag, rng: np.random.Generator) -> List[Move]:
        """Apply perturbation_size random legal moves in place"""
        applied: List[Move] = []
        for _ in range(self.config.perturbation_size):
            moves = legal_moves(d, self.constraints, self.config.max_parents)
            if not moves:
                break
            move = moves[int(rng.integers(len(moves)))]
            apply_move(d, move)
            applied.append(move)
        return applied

    def run(self, start: Dag) -> Tuple[Dag, SearchTrace]:
        incumbent = start.copy()
        local = self._local_scores(incumbent)
        initial = sum(local.values())
        iterations = self.ascend(incumbent, local)
        score = sum(local.values())
        if not math.isfinite(score):
            raise SearchError(
                "Every reachable structure scores -inf; the data are too few for the local regressions"
            )

        rng = np.random.default_rng(self.config.seed)
        restarts: List[RestartRecord] = []
        for i in range(self.config.restarts):
            candidate = incumbent.copy()
            perturbation = self.perturb(candidate, rng)
            candidate_local = self._local_scores(candidate)
            ascent = self.ascend(candidate, candidate_local)
            candidate_score = sum(candidate_local.values())
            accepted = candidate_score > score + MIN_IMPROVEMENT
            restarts.append(
                RestartRecord(perturbation=perturbation, ascent=ascent, score=candidate_score, accepted=accepted)
            )
            logger.debug(f"Restart {i + 1}: score {candidate_score:.4f} ({'accepted' if accepted else 'rejected'})")
            if accepted:
                incumbent, local, score = candidate, candidate_local, candidate_score

        trace = SearchTrace(
            initial_score=initial,
            iterations=iterations,
            restarts=restarts,
            restarts_taken=len(restarts),
            final_score=score,
        )
        logger.debug(
            f"Hill-Climbing finished: {incumbent.num_edges} edges, score {score:.4f}, "
            f"local score cache hit rate {self.scorer.cache.stats.hit_rate:.1%}"
        )
        return incumbent, trace


def hill_climb(
    t: MixedTable,
    constraints: Optional[ConstraintSet] = None,
    cfg: Optional[SearchConfig] = None,
    scorer: Optional[LocalScorer] = None,
) -> Tuple[Dag, SearchTrace]:
    """
    Learn a DAG from a complete table.

    Args:
        t: Complete table
        constraints: Blacklist/whitelist (none by default)
        cfg: Search parameters
        scorer: Reuse an existing scorer (and its cache) on the same data

    Returns:
        (best DAG, SearchTrace)
    """
    constraints = constraints or ConstraintSet()
    cfg = cfg or SearchConfig()
    scorer = scorer or LocalScorer(t, criterion=cfg.score)
    start = constraints.initial_dag(t.nodes)
    return HillClimber(scorer, constraints, cfg).run(start)
