"""Enumerations shared across the toolkit"""

from enum import Enum


class NodeKind(str, Enum):
    """Variable type of a network node"""
    DISCRETE = "discrete"
    CONTINUOUS = "continuous"


class ConnectionType(str, Enum):
    """Fundamental connection of a three-node, two-edge pattern"""
    SERIAL = "serial"
    DIVERGING = "diverging"
    CONVERGING = "converging"


class TransformKind(str, Enum):
    """Normalizing transforms tried on continuous columns"""
    NONE = "none"
    LOG = "log"
    ARCSIN = "arcsin"
    ARCSINH = "arcsinh"
    SQRT = "sqrt"
    BOX_COX = "box_cox"
    YEO_JOHNSON = "yeo_johnson"
    ORDERED_QUANTILE = "ordered_quantile"


class ScoreCriterion(str, Enum):
    """Network score, on the larger-is-better scale"""
    BIC = "bic"
    AIC = "aic"


class MoveKind(str, Enum):
    """Single-edge edit; declaration order is the tie-break order"""
    ADD = "add"
    DELETE = "delete"
    REVERSE = "reverse"
