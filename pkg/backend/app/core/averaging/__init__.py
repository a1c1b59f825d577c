"""Bootstrap model averaging"""

from .aggregate import AveragedGraph, acyclic_completion, average_structures, edge_strengths
from .bootstrap import bootstrap_resample, learn_averaged, learn_replicates, replicate_rng
from .writers import (
    AveragedDocument,
    averaged_dot,
    from_document,
    read_json,
    strength_frame,
    to_document,
    write_dot,
    write_json,
    write_strengths,
)

__all__ = [
    "AveragedDocument",
    "AveragedGraph",
    "acyclic_completion",
    "average_structures",
    "averaged_dot",
    "bootstrap_resample",
    "edge_strengths",
    "from_document",
    "learn_averaged",
    "learn_replicates",
    "read_json",
    "replicate_rng",
    "strength_frame",
    "to_document",
    "write_dot",
    "write_json",
    "write_strengths",
]
