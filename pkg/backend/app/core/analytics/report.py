"""Markdown and JSON network reports"""

import logging
from pathlib import Path
from typing import List, Mapping, Optional

from app.core.analytics.queries import (
    Network,
    ambiguous_adjacencies,
    as_network,
    connection_counts,
    connection_inventory,
    degree_summary,
    domain_connections,
    influence_set,
    isolated_nodes,
)
from app.core.graph.separation import connected_components
from app.models.enums import NodeKind
from app.models.schemas import NetworkReport

logger = logging.getLogger(__name__)


def build_report(
    g: Network,
    domain_map: Optional[Mapping[str, str]] = None,
    sources: Optional[List[str]] = None,
) -> NetworkReport:
    """
    Summarize a network.

    Influence sets are computed for sources, by default every discrete node.
    """
    pdag = as_network(g)
    if sources is None:
        sources = [n.name for n in pdag.nodes if n.kind == NodeKind.DISCRETE]
    return NetworkReport(
        nodes=len(pdag.names),
        directed_edges=len(pdag.directed_edges),
        undirected_edges=len(pdag.undirected_edges),
        components=[pdag.sort_names(c) for c in connected_components(pdag)],
        isolated=isolated_nodes(pdag),
        ambiguous=ambiguous_adjacencies(pdag),
        degrees=degree_summary(pdag),
        connection_counts=connection_counts(connection_inventory(pdag)),
        influence=[influence_set(pdag, s) for s in sources],
        domains=domain_connections(pdag, domain_map) if domain_map is not None else None,
    )


def render_markdown(report: NetworkReport) -> str:
    lines = [
        "# Network report",
        "",
        f"- Nodes: {report.nodes}",
        f"- Directed edges: {report.directed_edges}",
        f"- Undirected edges: {report.undirected_edges}",
        f"- Connected components: {len(report.components)}",
        f"- Isolated nodes: {', '.join(report.isolated) if report.isolated else 'none'}",
        "",
        "## Degrees",
        "",
        "| Node | In-degree | Out-degree | Mb size |",
        "|---|---|---|---|",
    ]
    for row in report.degrees.rows:
        lines.append(f"| {row.node} | {row.in_degree} | {row.out_degree} | {row.mb_size} |")
    for label, stats in (("Average", report.degrees.mean), ("St. Dev.", report.degrees.std)):
        lines.append(f"| {label} | {stats['in_degree']:.2f} | {stats['out_degree']:.2f} | {stats['mb_size']:.2f} |")

    counts = report.connection_counts
    lines += [
        "",
        "## Fundamental connections",
        "",
        f"- Serial: {counts['serial']}",
        f"- Diverging: {counts['diverging']}",
        f"- Converging: {counts['converging']} ({counts['v_structures']} v-structures)",
    ]

    if report.influence:
        lines += ["", "## Influence", ""]
        for item in report.influence:
            lines.append(
                f"- {item.source}: {len(item.direct)} direct, {len(item.indirect)} indirect"
                + (f" ({', '.join(item.direct)})" if item.direct else "")
            )

    if report.ambiguous:
        lines += ["", "## Ambiguous adjacencies", ""]
        lines += [f"- {a} -- {b}" for a, b in report.ambiguous]

    if report.domains is not None:
        lines += ["", "## Domain connections", "", "| Domain | Number | Connected domains |", "|---|---|---|"]
        for item in report.domains:
            lines.append(f"| {item.domain} | {item.count} | {item.render()} |")

    lines += ["", "## Components", ""]
    lines += [f"{i}. {', '.join(c)}" for i, c in enumerate(report.components, start=1)]
    return "\n".join(lines) + "\n"


def write_report(report: NetworkReport, directory: Path) -> None:
    directory = Path(directory)
    (directory / "report.md").write_text(render_markdown(report))
    (directory / "report.json").write_text(report.model_dump_json(indent=2))
    logger.info(f"Wrote network report to {directory}")
