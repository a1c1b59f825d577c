"""Post-estimation analytics"""

from .queries import (
    ambiguous_adjacencies,
    connection_counts,
    connection_inventory,
    degree_summary,
    domain_connections,
    influence_set,
    isolated_nodes,
)
from .report import build_report, render_markdown, write_report

__all__ = [
    "ambiguous_adjacencies",
    "build_report",
    "connection_counts",
    "connection_inventory",
    "degree_summary",
    "domain_connections",
    "influence_set",
    "isolated_nodes",
    "render_markdown",
    "write_report",
]
