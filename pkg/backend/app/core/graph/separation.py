"""Structural queries: Markov blankets, d-separation, connections, degrees"""

from typing import FrozenSet, Iterable, List, Set, Tuple, Union

import networkx as nx
import numpy as np

from app.core.exceptions import ArgumentError, StructuralError
from app.core.graph.dag import Dag, Pdag
from app.models.enums import ConnectionType
from app.models.schemas import ConnectionKind, DegreeRow, DegreeTable, FactorTerm

Graph = Union[Dag, Pdag]

# Bayes-ball travel directions
_FROM_CHILD = "up"
_FROM_PARENT = "down"


def _arc(g: Graph, u: str, v: str) -> bool:
    if isinstance(g, Dag):
        return g.has_edge(u, v)
    return g.is_directed(u, v)


def markov_blanket(g: Graph, v: str) -> FrozenSet[str]:
    """
    Parents, children and the children's other parents of v.

    On a Pdag the undirected neighbours of v are included as well.
    """
    children = g.children(v)
    blanket: Set[str] = set(g.parents(v)) | set(children)
    for child in children:
        blanket |= g.parents(child)
    if isinstance(g, Pdag):
        blanket |= g.neighbors(v)
    blanket.discard(v)
    return frozenset(blanket)


def d_separated(d: Dag, x: Iterable[str], y: Iterable[str], z: Iterable[str] = ()) -> bool:
    """
    Test whether x and y are d-separated given z (Bayes-ball reachability).

    Args:
        d: The DAG
        x, y, z: Pairwise disjoint node sets

    Returns:
        True iff every path between x and y is blocked by z

    Raises:
        ArgumentError: If the sets overlap
        StructuralError: If a name is not a node of d
    """
    xs, ys, zs = set(x), set(y), set(z)
    for name in xs | ys | zs:
        d.index(name)
    if xs & ys or xs & zs or ys & zs:
        raise ArgumentError("d-separation sets must be pairwise disjoint")
    if not xs or not ys:
        return True

    # colliders are opened by z or any descendant of z
    opened = set(zs)
    for node in zs:
        opened |= d.ancestors(node)

    visited: Set[Tuple[str, str]] = set()
    schedule = [(node, _FROM_CHILD) for node in d.sort_names(xs)]
    while schedule:
        node, direction = schedule.pop()
        if (node, direction) in visited:
            continue
        visited.add((node, direction))
        if node in ys:
            return False

        if direction == _FROM_CHILD and node not in zs:
            schedule.extend((p, _FROM_CHILD) for p in d.parents(node))
            schedule.extend((c, _FROM_PARENT) for c in d.children(node))
        elif direction == _FROM_PARENT:
            if node in opened:
                schedule.extend((p, _FROM_CHILD) for p in d.parents(node))
            if node not in zs:
                schedule.extend((c, _FROM_PARENT) for c in d.children(node))
    return True


def classify_connection(g: Graph, triple: Tuple[str, str, str]) -> ConnectionKind:
    """
    Classify (a, z, b) as serial, diverging or converging.

    Raises:
        StructuralError: If a-z or z-b is not a directed edge
        ArgumentError: If a == b
    """
    a, z, b = triple
    if a == b:
        raise ArgumentError("Triple endpoints must differ")
    a_in, a_out = _arc(g, a, z), _arc(g, z, a)
    b_in, b_out = _arc(g, b, z), _arc(g, z, b)
    if not (a_in or a_out) or not (b_in or b_out):
        raise StructuralError(f"Triple ({a}, {z}, {b}) is missing an edge")

    if a_in and b_in:
        return ConnectionKind(
            kind=ConnectionType.CONVERGING,
            collider_is_vstructure=not g.adjacent(a, b),
        )
    if a_out and b_out:
        return ConnectionKind(kind=ConnectionType.DIVERGING)
    return ConnectionKind(kind=ConnectionType.SERIAL)


def factorization(d: Dag) -> List[FactorTerm]:
    """One (node | parents) term per node in topological order"""
    return [
        FactorTerm(node=v, parents=d.sort_names(d.parents(v)))
        for v in d.topological_order()
    ]


def render_factorization(d: Dag) -> str:
    return "".join(str(term) for term in factorization(d))


def degrees(g: Graph) -> DegreeTable:
    """
    In-degree, out-degree and Markov blanket size per node.

    Undirected edges of a Pdag count toward neither in- nor out-degree,
    only toward the blanket.
    """
    rows = [
        DegreeRow(
            node=v,
            in_degree=len(g.parents(v)),
            out_degree=len(g.children(v)),
            mb_size=len(markov_blanket(g, v)),
        )
        for v in g.names
    ]
    columns = {
        "in_degree": np.array([r.in_degree for r in rows], dtype=float),
        "out_degree": np.array([r.out_degree for r in rows], dtype=float),
        "mb_size": np.array([r.mb_size for r in rows], dtype=float),
    }
    if rows:
        mean = {k: float(np.mean(v)) for k, v in columns.items()}
        std = {k: float(np.std(v)) for k, v in columns.items()}
    else:
        mean = {k: 0.0 for k in columns}
        std = {k: 0.0 for k in columns}
    return DegreeTable(rows=rows, mean=mean, std=std)


def connected_components(g: Graph) -> List[FrozenSet[str]]:
    """Undirected-reachability partition ordered by first declared member"""
    undirected = g.to_undirected_networkx() if isinstance(g, Pdag) else g.to_networkx().to_undirected()
    components = [frozenset(c) for c in nx.connected_components(undirected)]
    return sorted(components, key=lambda c: min(g.index(n) for n in c))
