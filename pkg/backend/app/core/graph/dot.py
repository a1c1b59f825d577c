"""Graphviz DOT emission with deterministic node and edge order"""

from typing import Dict, Optional, Tuple, Union

from app.core.graph.dag import Dag, Pdag
from app.models.enums import NodeKind

# Qualitative palette for domain colouring
PALETTE = (
    "#8dd3c7", "#ffffb3", "#bebada", "#fb8072", "#80b1d3", "#fdb462",
    "#b3de69", "#fccde5", "#d9d9d9", "#bc80bd", "#ccebc5", "#ffed6f",
    "#a6cee3", "#b2df8a", "#fb9a99", "#fdbf6f",
)


def _quote(text: str) -> str:
    escaped = text.replace("\\", "\\\\").replace('"', '\\"')
    return f'"{escaped}"'


def to_dot(
    graph: Union[Dag, Pdag],
    name: str = "network",
    edge_labels: Optional[Dict[Tuple[str, str], str]] = None,
    node_colors: Optional[Dict[str, str]] = None,
    comment: Optional[str] = None,
) -> str:
    """
    Render a Dag or Pdag as DOT text.

    Undirected edges are written as arcs with dir=none. Discrete nodes are
    boxes, continuous nodes ellipses.

    Args:
        graph: Graph to render
        name: Graph identifier
        edge_labels: Optional label per (u, v) pair in rendered orientation
        node_colors: Optional fill colour per node
        comment: Optional text emitted as leading // comment lines

    Returns:
        DOT source ending in a newline
    """
    edge_labels = edge_labels or {}
    node_colors = node_colors or {}
    lines = []
    if comment:
        lines.extend(f"// {line}" for line in comment.splitlines())
    lines.append(f"digraph {_quote(name)} {{")

    for node in graph.nodes:
        attrs = ["shape=box" if node.kind == NodeKind.DISCRETE else "shape=ellipse"]
        if node.name in node_colors:
            attrs.append(f"style=filled, fillcolor={_quote(node_colors[node.name])}")
        lines.append(f"  {_quote(node.name)} [{', '.join(attrs)}];")

    if isinstance(graph, Dag):
        directed, undirected = graph.edges, []
    else:
        directed, undirected = graph.directed_edges, graph.undirected_edges

    for u, v in directed:
        label = edge_labels.get((u, v))
        attrs = f" [label={_quote(label)}]" if label is not None else ""
        lines.append(f"  {_quote(u)} -> {_quote(v)}{attrs};")
    for u, v in undirected:
        label = edge_labels.get((u, v))
        attrs = "dir=none" + (f", label={_quote(label)}" if label is not None else "")
        lines.append(f"  {_quote(u)} -> {_quote(v)} [{attrs}];")

    lines.append("}")
    return "\n".join(lines) + "\n"


def domain_colors(domain_map: Dict[str, str]) -> Dict[str, str]:
    """Assign a palette colour per domain (sorted), mapped back to nodes"""
    domains = sorted(set(domain_map.values()))
    by_domain = {d: PALETTE[i % len(PALETTE)] for i, d in enumerate(domains)}
    return {node: by_domain[d] for node, d in domain_map.items()}
