"""Directed acyclic and partially directed graphs over typed nodes"""

import logging
from typing import Dict, FrozenSet, Iterable, List, Sequence, Set, Tuple

import networkx as nx

from app.core.exceptions import StructuralError
from app.models.enums import NodeKind
from app.models.schemas import NodeId

logger = logging.getLogger(__name__)

Edge = Tuple[str, str]


def _index_nodes(nodes: Sequence[NodeId]) -> Dict[str, int]:
    index: Dict[str, int] = {}
    for i, node in enumerate(nodes):
        if node.name in index:
            raise StructuralError(f"Duplicate node name: {node.name}")
        index[node.name] = i
    return index


def is_acyclic(nodes: Iterable[str], edges: Iterable[Edge]) -> bool:
    """
    Check a candidate edge set for directed cycles.

    Args:
        nodes: Node names
        edges: Ordered (parent, child) pairs

    Returns:
        True iff the edge set has no directed cycle

    Raises:
        StructuralError: If an edge references an unknown node
    """
    graph = nx.DiGraph()
    graph.add_nodes_from(nodes)
    for u, v in edges:
        if u not in graph or v not in graph:
            raise StructuralError(f"Edge {u}->{v} references an unknown node")
        if u == v:
            return False
        graph.add_edge(u, v)
    return nx.is_directed_acyclic_graph(graph)


class _TypedGraph:
    """Node bookkeeping shared by Dag and Pdag"""

    def __init__(self, nodes: Iterable[NodeId]):
        self._nodes: Tuple[NodeId, ...] = tuple(nodes)
        self._index = _index_nodes(self._nodes)

    @property
    def nodes(self) -> Tuple[NodeId, ...]:
        return self._nodes

    @property
    def names(self) -> Tuple[str, ...]:
        return tuple(n.name for n in self._nodes)

    def __contains__(self, name: object) -> bool:
        return name in self._index

    def __len__(self) -> int:
        return len(self._nodes)

    def node(self, name: str) -> NodeId:
        self._check(name)
        return self._nodes[self._index[name]]

    def kind(self, name: str) -> NodeKind:
        return self.node(name).kind

    def index(self, name: str) -> int:
        self._check(name)
        return self._index[name]

    def sort_names(self, names: Iterable[str]) -> List[str]:
        """Sort names by declaration order"""
        return sorted(names, key=self.index)

    def _check(self, *names: str) -> None:
        for name in names:
            if name not in self._index:
                raise StructuralError(f"Unknown node: {name}")


class Dag(_TypedGraph):
    """
    Directed acyclic graph over typed nodes.

    Acyclicity is enforced on every mutation: a rejected edit raises
    StructuralError and leaves the graph unchanged. Query methods never
    mutate and are safe to share across threads once construction ends.
    """

    def __init__(self, nodes: Iterable[NodeId], edges: Iterable[Edge] = ()):
        super().__init__(nodes)
        self._graph = nx.DiGraph()
        self._graph.add_nodes_from(self.names)
        for u, v in edges:
            self.add_edge(u, v)

    # === Queries
    @property
    def edges(self) -> List[Edge]:
        """Edges sorted by (parent, child) declaration order"""
        return sorted(self._graph.edges(), key=lambda e: (self._index[e[0]], self._index[e[1]]))

    @property
    def edge_set(self) -> FrozenSet[Edge]:
        return frozenset(self._graph.edges())

    @property
    def num_edges(self) -> int:
        return self._graph.number_of_edges()

    def has_edge(self, u: str, v: str) -> bool:
        self._check(u, v)
        return self._graph.has_edge(u, v)

    def adjacent(self, u: str, v: str) -> bool:
        return self.has_edge(u, v) or self.has_edge(v, u)

    def parents(self, v: str) -> FrozenSet[str]:
        self._check(v)
        return frozenset(self._graph.predecessors(v))

    def children(self, v: str) -> FrozenSet[str]:
        self._check(v)
        return frozenset(self._graph.successors(v))

    def ancestors(self, v: str) -> FrozenSet[str]:
        self._check(v)
        return frozenset(nx.ancestors(self._graph, v))

    def descendants(self, v: str) -> FrozenSet[str]:
        self._check(v)
        return frozenset(nx.descendants(self._graph, v))

    def has_path(self, u: str, v: str) -> bool:
        self._check(u, v)
        return nx.has_path(self._graph, u, v)

    def topological_order(self) -> List[str]:
        """Topological order with ties broken by declaration order"""
        return list(nx.lexicographical_topological_sort(self._graph, key=self._index.__getitem__))

    def skeleton(self) -> FrozenSet[FrozenSet[str]]:
        return frozenset(frozenset(e) for e in self._graph.edges())

    def v_structures(self) -> Set[Tuple[str, str, str]]:
        """Colliders a->z<-b with a, b non-adjacent; a precedes b in node order"""
        found = set()
        for z in self.names:
            pa = self.sort_names(self.parents(z))
            for i, a in enumerate(pa):
                for b in pa[i + 1:]:
                    if not self.adjacent(a, b):
                        found.add((a, z, b))
        return found

    def to_networkx(self) -> nx.DiGraph:
        return self._graph.copy()

    def copy(self) -> "Dag":
        clone = Dag(self._nodes)
        clone._graph = self._graph.copy()
        return clone

    # === Mutations
    def would_create_cycle(self, u: str, v: str) -> bool:
        """Would adding u->v close a directed cycle?"""
        self._check(u, v)
        return u == v or nx.has_path(self._graph, v, u)

    def add_edge(self, u: str, v: str) -> None:
        self._check(u, v)
        if u == v:
            raise StructuralError(f"Self-loop on {u}")
        if self._graph.has_edge(u, v):
            return
        if self._graph.has_edge(v, u):
            raise StructuralError(f"Edge {v}->{u} already present; reverse it instead")
        if self.would_create_cycle(u, v):
            raise StructuralError(f"Adding {u}->{v} creates a directed cycle")
        self._graph.add_edge(u, v)

    def remove_edge(self, u: str, v: str) -> None:
        self._check(u, v)
        if not self._graph.has_edge(u, v):
            raise StructuralError(f"No edge {u}->{v}")
        self._graph.remove_edge(u, v)

    def reverse_edge(self, u: str, v: str) -> None:
        """Turn u->v into v->u, rejecting the edit if it closes a cycle"""
        self.remove_edge(u, v)
        if nx.has_path(self._graph, u, v):
            self._graph.add_edge(u, v)
            raise StructuralError(f"Reversing {u}->{v} creates a directed cycle")
        self._graph.add_edge(v, u)

    def to_pdag(self) -> "Pdag":
        return Pdag(self._nodes, directed=self._graph.edges())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Dag):
            return NotImplemented
        return self._nodes == other._nodes and self.edge_set == other.edge_set

    def __hash__(self) -> int:
        return hash((self._nodes, self.edge_set))

    def __repr__(self) -> str:
        arcs = ", ".join(f"{u}->{v}" for u, v in self.edges)
        return f"Dag([{arcs}])"


class Pdag(_TypedGraph):
    """Partially directed graph: directed arcs plus undirected edges"""

    def __init__(
        self,
        nodes: Iterable[NodeId],
        directed: Iterable[Edge] = (),
        undirected: Iterable[Iterable[str]] = (),
    ):
        super().__init__(nodes)
        self._directed: Set[Edge] = set()
        self._undirected: Set[FrozenSet[str]] = set()
        for u, v in directed:
            self._check(u, v)
            if u == v:
                raise StructuralError(f"Self-loop on {u}")
            self._directed.add((u, v))
        for pair in undirected:
            key = frozenset(pair)
            if len(key) != 2:
                raise StructuralError(f"Undirected edge needs two distinct endpoints: {sorted(key)}")
            self._check(*key)
            self._undirected.add(key)
        directed_pairs = {frozenset(e) for e in self._directed}
        overlap = directed_pairs & self._undirected
        if overlap:
            names = sorted(sorted(p) for p in overlap)
            raise StructuralError(f"Pairs both directed and undirected: {names}")

    @property
    def directed_edges(self) -> List[Edge]:
        return sorted(self._directed, key=lambda e: (self._index[e[0]], self._index[e[1]]))

    @property
    def undirected_edges(self) -> List[Tuple[str, str]]:
        pairs = [tuple(self.sort_names(p)) for p in self._undirected]
        return sorted(pairs, key=lambda e: (self._index[e[0]], self._index[e[1]]))

    def parents(self, v: str) -> FrozenSet[str]:
        self._check(v)
        return frozenset(u for u, w in self._directed if w == v)

    def children(self, v: str) -> FrozenSet[str]:
        self._check(v)
        return frozenset(w for u, w in self._directed if u == v)

    def neighbors(self, v: str) -> FrozenSet[str]:
        """Endpoints joined to v by an undirected edge"""
        self._check(v)
        return frozenset(w for pair in self._undirected if v in pair for w in pair if w != v)

    def adjacent(self, u: str, v: str) -> bool:
        self._check(u, v)
        return (u, v) in self._directed or (v, u) in self._directed or frozenset((u, v)) in self._undirected

    def is_directed(self, u: str, v: str) -> bool:
        return (u, v) in self._directed

    def is_undirected(self, u: str, v: str) -> bool:
        return frozenset((u, v)) in self._undirected

    def to_undirected_networkx(self) -> nx.Graph:
        graph = nx.Graph()
        graph.add_nodes_from(self.names)
        graph.add_edges_from(self._directed)
        graph.add_edges_from(tuple(p) for p in self._undirected)
        return graph

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Pdag):
            return NotImplemented
        return (
            self._nodes == other._nodes
            and self._directed == other._directed
            and self._undirected == other._undirected
        )

    def __hash__(self) -> int:
        return hash((self._nodes, frozenset(self._directed), frozenset(self._undirected)))

    def __repr__(self) -> str:
        parts = [f"{u}->{v}" for u, v in self.directed_edges]
        parts += [f"{u}--{v}" for u, v in self.undirected_edges]
        return f"Pdag([{', '.join(parts)}])"


def as_pdag(graph: "Dag | Pdag") -> Pdag:
    return graph.to_pdag() if isinstance(graph, Dag) else graph


def make_nodes(kinds: Dict[str, NodeKind] | Iterable[Tuple[str, NodeKind]]) -> List[NodeId]:
    """Build NodeIds from a name -> kind mapping, preserving order"""
    items = kinds.items() if isinstance(kinds, dict) else kinds
    return [NodeId(name=name, kind=kind) for name, kind in items]

