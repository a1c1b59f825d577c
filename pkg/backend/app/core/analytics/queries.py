"""Read-only structural queries over learned networks"""

import logging
from itertools import combinations
from typing import Dict, List, Mapping, Tuple, Union

import networkx as nx

from app.core.averaging.aggregate import AveragedGraph
from app.core.exceptions import ArgumentError
from app.core.graph.dag import Dag, Pdag, as_pdag
from app.core.graph.separation import classify_connection, degrees
from app.models.enums import NodeKind
from app.models.schemas import ConnectionRecord, DegreeTable, DomainConnection, InfluenceSet

logger = logging.getLogger(__name__)

Network = Union[AveragedGraph, Pdag, Dag]


def as_network(g: Network) -> Pdag:
    return as_pdag(g.pdag if isinstance(g, AveragedGraph) else g)


def influence_set(g: Network, source: str) -> InfluenceSet:
    """Children of source, and the rest of its directed descendants"""
    pdag = as_network(g)
    direct = pdag.children(source)
    arcs = nx.DiGraph(pdag.directed_edges)
    arcs.add_nodes_from(pdag.names)
    indirect = nx.descendants(arcs, source) - direct - {source}
    return InfluenceSet(source=source, direct=pdag.sort_names(direct), indirect=pdag.sort_names(indirect))


def domain_connections(g: Network, domain_map: Mapping[str, str]) -> List[DomainConnection]:
    """
    Cross-domain edges per domain, directed and undirected alike.

    Continuous nodes must be mapped; unmapped discrete nodes (e.g. AREA,
    YEAR) are not indicators and are skipped.
    """
    pdag = as_network(g)
    unmapped = [n.name for n in pdag.nodes if n.kind == NodeKind.CONTINUOUS and n.name not in domain_map]
    if unmapped:
        raise ArgumentError(f"Indicators without a domain: {unmapped}")

    partners: Dict[str, Dict[str, int]] = {d: {} for d in sorted(set(domain_map.values()))}
    for u, v in pdag.directed_edges + pdag.undirected_edges:
        if u not in domain_map or v not in domain_map:
            continue
        a, b = domain_map[u], domain_map[v]
        if a == b:
            continue
        partners[a][b] = partners[a].get(b, 0) + 1
        partners[b][a] = partners[b].get(a, 0) + 1

    return [
        DomainConnection(domain=d, count=len(p), partners=dict(sorted(p.items())))
        for d, p in partners.items()
    ]


def connection_inventory(g: Network) -> List[ConnectionRecord]:
    """Every two-edge directed triple (a, z, b), a before b in node order"""
    pdag = as_network(g)
    records = []
    for z in pdag.names:
        around = pdag.sort_names(pdag.parents(z) | pdag.children(z))
        for a, b in combinations(around, 2):
            records.append(ConnectionRecord(triple=(a, z, b), connection=classify_connection(pdag, (a, z, b))))
    return records


def connection_counts(records: List[ConnectionRecord]) -> Dict[str, int]:
    counts = {"serial": 0, "diverging": 0, "converging": 0, "v_structures": 0}
    for record in records:
        counts[record.connection.kind.value] += 1
        counts["v_structures"] += record.connection.collider_is_vstructure
    return counts


def degree_summary(g: Network) -> DegreeTable:
    return degrees(as_network(g))


def isolated_nodes(g: Network) -> List[str]:
    pdag = as_network(g)
    return [v for v in pdag.names if not (pdag.parents(v) or pdag.children(v) or pdag.neighbors(v))]


def ambiguous_adjacencies(g: Network) -> List[Tuple[str, str]]:
    """Undirected edges of the averaged network"""
    return as_network(g).undirected_edges
