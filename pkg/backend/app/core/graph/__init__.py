"""Graph structures and structural queries"""

from .dag import Dag, Pdag, as_pdag, is_acyclic, make_nodes
from .dot import domain_colors, to_dot
from .equivalence import equivalence_class, markov_equivalent, structural_hamming_distance
from .separation import (
    classify_connection,
    connected_components,
    d_separated,
    degrees,
    factorization,
    markov_blanket,
    render_factorization,
)

__all__ = [
    "Dag",
    "Pdag",
    "as_pdag",
    "is_acyclic",
    "make_nodes",
    "domain_colors",
    "to_dot",
    "equivalence_class",
    "markov_equivalent",
    "structural_hamming_distance",
    "classify_connection",
    "connected_components",
    "d_separated",
    "degrees",
    "factorization",
    "markov_blanket",
    "render_factorization",
]
