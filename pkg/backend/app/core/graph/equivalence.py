"""Markov equivalence classes: CPDAG construction via v-structures and Meek closure"""

import logging
from itertools import combinations
from typing import FrozenSet, Set, Tuple

from app.core.graph.dag import Dag, Pdag

logger = logging.getLogger(__name__)


class _Orientation:
    """Working state of a partially oriented skeleton"""

    def __init__(self, d: Dag):
        self.names = d.names
        self.directed: Set[Tuple[str, str]] = set()
        for a, z, b in d.v_structures():
            self.directed.add((a, z))
            self.directed.add((b, z))
        self.undirected: Set[FrozenSet[str]] = {
            frozenset(e) for e in d.edge_set if e not in self.directed
        }

    def adjacent(self, u: str, v: str) -> bool:
        return (u, v) in self.directed or (v, u) in self.directed or frozenset((u, v)) in self.undirected

    def undirected_neighbors(self, v: str) -> Set[str]:
        return {w for pair in self.undirected if v in pair for w in pair if w != v}

    def orient(self, u: str, v: str) -> None:
        self.undirected.discard(frozenset((u, v)))
        self.directed.add((u, v))

    def rule_1(self, u: str, v: str) -> bool:
        # a->u, u-v, a not adjacent to v  =>  u->v
        return any(w == u and not self.adjacent(a, v) for a, w in self.directed if a != v)

    def rule_2(self, u: str, v: str) -> bool:
        # u->c->v, u-v  =>  u->v
        return any((u, c) in self.directed and (c, v) in self.directed for c in self.names)

    def rule_3(self, u: str, v: str) -> bool:
        # u-c->v, u-d->v, c not adjacent to d, u-v  =>  u->v
        candidates = [c for c in self.undirected_neighbors(u) if (c, v) in self.directed]
        return any(not self.adjacent(c, d) for c, d in combinations(candidates, 2))


def equivalence_class(d: Dag) -> Pdag:
    """
    Completed partially directed graph of d's Markov equivalence class.

    Edges in v-structures are directed first; Meek rules 1-3 then orient
    every edge compelled by acyclicity and the absence of new v-structures.
    All other skeleton edges stay undirected.
    """
    state = _Orientation(d)
    changed = True
    while changed:
        changed = False
        for pair in sorted(state.undirected, key=lambda p: sorted(d.index(n) for n in p)):
            if pair not in state.undirected:
                continue
            u, v = d.sort_names(pair)
            for a, b in ((u, v), (v, u)):
                if state.rule_1(a, b) or state.rule_2(a, b) or state.rule_3(a, b):
                    state.orient(a, b)
                    changed = True
                    break
    logger.debug(f"CPDAG: {len(state.directed)} directed, {len(state.undirected)} undirected")
    return Pdag(d.nodes, directed=state.directed, undirected=state.undirected)


def markov_equivalent(d1: Dag, d2: Dag) -> bool:
    """Same skeleton and same v-structures"""
    return d1.skeleton() == d2.skeleton() and d1.v_structures() == d2.v_structures()


def structural_hamming_distance(p1: Pdag, p2: Pdag) -> int:
    """Number of node pairs whose edge mark differs between two Pdags"""
    distance = 0
    for u, v in combinations(p1.names, 2):
        mark1 = _mark(p1, u, v)
        mark2 = _mark(p2, u, v)
        if mark1 != mark2:
            distance += 1
    return distance


def _mark(p: Pdag, u: str, v: str) -> str:
    if p.is_directed(u, v):
        return "->"
    if p.is_directed(v, u):
        return "<-"
    if p.is_undirected(u, v):
        return "--"
    return ""
