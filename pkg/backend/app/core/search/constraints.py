"""Prior structural knowledge: blacklists, whitelists and the two encoding strategies"""

import logging
from dataclasses import dataclass, field
from itertools import combinations
from pathlib import Path
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple

from app.core.exceptions import ConfigError, ConstraintError, StructuralError
from app.core.graph.dag import Dag, Edge, make_nodes
from app.models.enums import NodeKind
from app.models.schemas import NodeId

logger = logging.getLogger(__name__)

Schema = Sequence[NodeId] | Mapping[str, NodeKind]


def as_nodes(schema: Schema) -> List[NodeId]:
    return make_nodes(dict(schema)) if isinstance(schema, Mapping) else list(schema)


@dataclass(frozen=True)
class ConstraintSet:
    """
    Edges the search must avoid or keep.

    Attributes:
        blacklist: Forbidden ordered pairs (from, to)
        whitelist: Required edges with a fixed direction
        either_way: Required adjacencies whose direction the search picks
    """
    blacklist: FrozenSet[Edge] = field(default_factory=frozenset)
    whitelist: FrozenSet[Edge] = field(default_factory=frozenset)
    either_way: FrozenSet[FrozenSet[str]] = field(default_factory=frozenset)

    def is_blacklisted(self, u: str, v: str) -> bool:
        return (u, v) in self.blacklist

    def is_pinned(self, u: str, v: str) -> bool:
        """Adjacency u-v must stay in the graph"""
        return (u, v) in self.whitelist or (v, u) in self.whitelist or frozenset((u, v)) in self.either_way

    def is_fixed(self, u: str, v: str) -> bool:
        """Edge u->v is whitelisted with its direction"""
        return (u, v) in self.whitelist

    def allows(self, u: str, v: str, nodes: Mapping[str, NodeKind]) -> bool:
        """May the edge u->v appear in a graph?"""
        if u == v or self.is_blacklisted(u, v) or (v, u) in self.whitelist:
            return False
        return not (nodes[u] == NodeKind.CONTINUOUS and nodes[v] == NodeKind.DISCRETE)

    @property
    def referenced(self) -> FrozenSet[str]:
        names = set()
        for pair in self.blacklist | self.whitelist:
            names.update(pair)
        for pair in self.either_way:
            names.update(pair)
        return frozenset(names)

    def merge(self, other: "ConstraintSet") -> "ConstraintSet":
        return ConstraintSet(
            blacklist=self.blacklist | other.blacklist,
            whitelist=self.whitelist | other.whitelist,
            either_way=self.either_way | other.either_way,
        )

    def initial_dag(self, schema: Schema) -> Dag:
        """
        Empty graph plus every whitelist entry.

        Either-direction entries are oriented by sorted names, flipped when
        that orientation is forbidden or closes a cycle.

        Raises:
            StructuralError: On unknown nodes
            ConstraintError: If no DAG can hold the whitelist
        """
        nodes = as_nodes(schema)
        kinds = {n.name: n.kind for n in nodes}
        unknown = sorted(self.referenced - set(kinds))
        if unknown:
            raise StructuralError(f"Constraints reference unknown nodes: {unknown}")

        clash = self.blacklist & self.whitelist
        if clash:
            raise ConstraintError(f"Edges both blacklisted and whitelisted: {sorted(clash)}")

        dag = Dag(nodes)
        for u, v in sorted(self.whitelist, key=lambda e: (dag.index(e[0]), dag.index(e[1]))):
            if not self.allows(u, v, kinds):
                raise ConstraintError(f"Whitelisted edge {u}->{v} violates the CLGBN constraint or the whitelist")
            if dag.would_create_cycle(u, v):
                raise ConstraintError(f"Whitelisted edge {u}->{v} closes a directed cycle")
            dag.add_edge(u, v)

        for pair in sorted(self.either_way, key=sorted):
            a, b = sorted(pair)
            for u, v in ((a, b), (b, a)):
                if self.allows(u, v, kinds) and not dag.would_create_cycle(u, v):
                    dag.add_edge(u, v)
                    break
            else:
                raise ConstraintError(f"Whitelisted pair {a}-{b} admits no legal orientation")
        return dag

    def validate(self, schema: Schema) -> None:
        """Raise unless some DAG satisfies every constraint"""
        self.initial_dag(schema)


def strategy1_blacklist(schema: Schema, denied: Iterable[Edge] = ()) -> ConstraintSet:
    """Blacklist every continuous -> discrete pair plus the denied pairs"""
    nodes = as_nodes(schema)
    names = {n.name for n in nodes}
    denied = list(denied)
    unknown = sorted({x for pair in denied for x in pair} - names)
    if unknown:
        raise StructuralError(f"Denied edges reference unknown nodes: {unknown}")

    blacklist = {
        (u.name, v.name)
        for u in nodes
        for v in nodes
        if u.kind == NodeKind.CONTINUOUS and v.kind == NodeKind.DISCRETE
    }
    blacklist.update((u, v) for u, v in denied)
    logger.info(f"Strategy 1: {len(blacklist)} blacklisted edges ({len(denied)} from prior knowledge)")
    return ConstraintSet(blacklist=frozenset(blacklist))


def strategy2_whitelist(
    schema: Schema,
    domain_map: Mapping[str, str],
    denied: Iterable[Edge] = (),
) -> ConstraintSet:
    """
    Strategy 1's blacklist plus every within-domain pair, either direction.

    Every continuous node must belong to a domain.
    """
    nodes = as_nodes(schema)
    names = [n.name for n in nodes]
    unmapped = [n.name for n in nodes if n.kind == NodeKind.CONTINUOUS and n.name not in domain_map]
    if unmapped:
        raise ConstraintError(f"Continuous nodes without a domain: {unmapped}")
    unknown = sorted(set(domain_map) - set(names))
    if unknown:
        raise StructuralError(f"Domain map references unknown nodes: {unknown}")

    members: Dict[str, List[str]] = {}
    for name in names:
        if name in domain_map:
            members.setdefault(domain_map[name], []).append(name)
    either_way = {frozenset(pair) for group in members.values() for pair in combinations(group, 2)}

    base = strategy1_blacklist(nodes, denied)
    logger.info(f"Strategy 2: {len(either_way)} within-domain pairs over {len(members)} domains")
    return ConstraintSet(blacklist=base.blacklist, either_way=frozenset(either_way))


# === Constraint files
def _lines(path: Path, header: Optional[str] = None) -> Iterable[Tuple[int, str]]:
    """Non-blank, non-comment lines with 1-based numbers; skips an optional header"""
    for number, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if header is not None and line.replace(" ", "").lower() == header:
            continue
        yield number, line


def _pair(line: str, number: int, sep: str = ",") -> Edge:
    parts = [p.strip() for p in line.split(sep)]
    if len(parts) != 2 or not all(parts):
        raise ConfigError(f"expected 'a{sep}b', got '{line}'", line=number)
    return parts[0], parts[1]


def read_blacklist(path: Path) -> List[Edge]:
    """One 'from,to' pair per line"""
    return [_pair(line, number) for number, line in _lines(path, header="from,to")]


def read_whitelist(path: Path) -> ConstraintSet:
    """Lines 'a,b' (either direction) or 'a->b' (directed)"""
    directed, either = set(), set()
    for number, line in _lines(path, header="from,to"):
        if "->" in line:
            directed.add(_pair(line, number, sep="->"))
        else:
            either.add(frozenset(_pair(line, number)))
    return ConstraintSet(whitelist=frozenset(directed), either_way=frozenset(either))


def read_domain_map(path: Path) -> Dict[str, str]:
    """Two columns 'indicator,domain'"""
    mapping: Dict[str, str] = {}
    for number, line in _lines(path, header="indicator,domain"):
        indicator, domain = _pair(line, number)
        if indicator in mapping and mapping[indicator] != domain:
            raise ConfigError(f"'{indicator}' mapped to both '{mapping[indicator]}' and '{domain}'", line=number)
        mapping[indicator] = domain
    return mapping
