"""Data models module"""

from .enums import ConnectionType, MoveKind, NodeKind, ScoreCriterion, TransformKind
from .schemas import (
    AveragingConfig,
    ComparisonRow,
    ComparisonTable,
    ConnectionKind,
    ConnectionRecord,
    CvConfig,
    CvReport,
    DegreeRow,
    DegreeTable,
    DomainConnection,
    EdgeStrength,
    FactorTerm,
    ImputationReport,
    InfluenceSet,
    ModelScore,
    Move,
    MoveRecord,
    NetworkReport,
    NodeId,
    RestartRecord,
    SearchConfig,
    SearchTrace,
    TransformSpec,
)

__all__ = [
    "ConnectionType",
    "MoveKind",
    "NodeKind",
    "ScoreCriterion",
    "TransformKind",
    "AveragingConfig",
    "ComparisonRow",
    "ComparisonTable",
    "ConnectionKind",
    "ConnectionRecord",
    "CvConfig",
    "CvReport",
    "DegreeRow",
    "DegreeTable",
    "DomainConnection",
    "EdgeStrength",
    "FactorTerm",
    "ImputationReport",
    "InfluenceSet",
    "ModelScore",
    "Move",
    "MoveRecord",
    "NetworkReport",
    "NodeId",
    "RestartRecord",
    "SearchConfig",
    "SearchTrace",
    "TransformSpec",
]
