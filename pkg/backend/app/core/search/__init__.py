"""Score-based structure learning under prior constraints"""

from .constraints import (
    ConstraintSet,
    read_blacklist,
    read_domain_map,
    read_whitelist,
    strategy1_blacklist,
    strategy2_whitelist,
)
from .hill_climb import HillClimber, apply_move, hill_climb, legal_moves

__all__ = [
    "ConstraintSet",
    "HillClimber",
    "apply_move",
    "hill_climb",
    "legal_moves",
    "read_blacklist",
    "read_domain_map",
    "read_whitelist",
    "strategy1_blacklist",
    "strategy2_whitelist",
]
