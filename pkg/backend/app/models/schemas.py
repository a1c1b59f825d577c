"""Core data models for the hybrid BN toolkit"""

from typing import Dict, List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

from app.config import settings
from app.models.enums import (
    ConnectionType,
    MoveKind,
    NodeKind,
    ScoreCriterion,
    TransformKind,
)


# Graph Models
class NodeId(BaseModel):
    """A typed network node"""
    model_config = ConfigDict(frozen=True)

    name: str = Field(min_length=1, description="Unique node label")
    kind: NodeKind = Field(description="Discrete or continuous")


class ConnectionKind(BaseModel):
    """Classification of a two-edge triple"""
    model_config = ConfigDict(frozen=True)

    kind: ConnectionType
    collider_is_vstructure: bool = Field(
        default=False,
        description="True for converging triples whose spouses are non-adjacent"
    )

    @model_validator(mode="after")
    def _vstructure_only_for_colliders(self):
        if self.collider_is_vstructure and self.kind != ConnectionType.CONVERGING:
            raise ValueError("only converging connections can be v-structures")
        return self


class FactorTerm(BaseModel):
    """One local term P(node | parents) of the joint factorization"""
    node: str
    parents: List[str] = Field(default_factory=list)

    def __str__(self) -> str:
        if not self.parents:
            return f"P({self.node})"
        return f"P({self.node}|{','.join(self.parents)})"


class DegreeRow(BaseModel):
    """Connectivity of one node"""
    node: str
    in_degree: int = Field(ge=0)
    out_degree: int = Field(ge=0)
    mb_size: int = Field(ge=0)


class DegreeTable(BaseModel):
    """Per-node degrees plus column means and population standard deviations"""
    rows: List[DegreeRow]
    mean: Dict[str, float]
    std: Dict[str, float]


# Preprocessing Models
class TransformSpec(BaseModel):
    """A fitted normalizing transform for one continuous column"""
    kind: TransformKind
    column: str
    lmbda: Optional[float] = Field(None, description="Box-Cox / Yeo-Johnson lambda")
    percentage: bool = Field(False, description="Arcsin input is on a 0-100 scale")
    reference_values: List[float] = Field(
        default_factory=list,
        description="Ordered Quantile: sorted distinct training values"
    )
    reference_scores: List[float] = Field(
        default_factory=list,
        description="Ordered Quantile: normal scores of reference_values"
    )
    extrapolation_slope: Optional[float] = Field(
        None,
        description="Ordered Quantile: slope continuing the map past either end of the training range"
    )
    normality_score: Optional[float] = Field(
        None,
        description="Pearson P divided by its degrees of freedom on the training column"
    )


class ImputationReport(BaseModel):
    """Summary of a KNN imputation pass"""
    cells_imputed: int = Field(ge=0)
    per_column: Dict[str, int] = Field(default_factory=dict)
    k: int = Field(ge=1)


# Search Models
class SearchConfig(BaseModel):
    """Hill-Climbing parameters"""
    restarts: int = Field(default=settings.DEFAULT_RESTARTS, ge=0)
    perturbation_size: int = Field(default=settings.PERTURBATION_SIZE, ge=1)
    score: ScoreCriterion = ScoreCriterion.BIC
    seed: int = 0
    max_parents: Optional[int] = Field(None, ge=0)


class Move(BaseModel):
    """A single-edge edit of a DAG"""
    model_config = ConfigDict(frozen=True)

    kind: MoveKind
    source: str
    target: str

    def __str__(self) -> str:
        return f"{self.kind.value} {self.source}->{self.target}"


class MoveRecord(BaseModel):
    """An accepted ascent step"""
    move: Move
    delta: float = Field(gt=0)


class RestartRecord(BaseModel):
    """One perturb-and-reascend round"""
    perturbation: List[Move]
    ascent: List[MoveRecord] = Field(default_factory=list)
    score: float
    accepted: bool


class SearchTrace(BaseModel):
    """History of a Hill-Climbing run"""
    initial_score: float
    iterations: List[MoveRecord] = Field(default_factory=list)
    restarts: List[RestartRecord] = Field(default_factory=list)
    restarts_taken: int = 0
    final_score: float


# Averaging Models
class AveragingConfig(BaseModel):
    """Bootstrap model-averaging parameters"""
    replicates: int = Field(default=settings.DEFAULT_REPLICATES, ge=1)
    strength_threshold: float = Field(default=settings.STRENGTH_THRESHOLD, gt=0.5, le=1.0)
    direction_threshold: float = Field(default=settings.DIRECTION_THRESHOLD, gt=0.5, le=1.0)
    seed: int = 0


class EdgeStrength(BaseModel):
    """Bootstrap support of one unordered node pair"""
    source: str = Field(description="First endpoint in node order")
    target: str = Field(description="Second endpoint in node order")
    strength: float = Field(ge=0.0, le=1.0)
    direction: Optional[float] = Field(
        None,
        ge=0.0,
        le=1.0,
        description="Fraction of edge-containing replicates oriented source->target"
    )

    @property
    def reverse_direction(self) -> Optional[float]:
        return None if self.direction is None else 1.0 - self.direction


# Validation Models
class CvConfig(BaseModel):
    """k-fold cross-validation parameters"""
    folds: int = Field(default=settings.DEFAULT_CV_FOLDS, ge=2)
    seed: int = 0
    standardize: bool = False


class CvReport(BaseModel):
    """Cross-validated posterior mean squared error"""
    per_node_mse: Dict[str, float]
    posterior_mse: float = Field(ge=0.0)
    fold_seed: int
    folds: int
    mode: Literal["fixed", "relearn"]
    flagged: List[str] = Field(
        default_factory=list,
        description="Predictions that fell back to the pooled regression"
    )


class ModelScore(BaseModel):
    """One entry of a model comparison"""
    label: str
    bic: float
    aic: float
    posterior_mse: float


class ComparisonRow(ModelScore):
    """Ranked comparison entry (rank 1 is best)"""
    bic_rank: int
    aic_rank: int
    mse_rank: int


class ComparisonTable(BaseModel):
    """Model comparison sorted by BIC, best first"""
    rows: List[ComparisonRow]


# Analytics Models
class InfluenceSet(BaseModel):
    """Nodes a source influences along directed edges"""
    source: str
    direct: List[str]
    indirect: List[str]


class DomainConnection(BaseModel):
    """Cross-domain edges touching one domain"""
    domain: str
    count: int = Field(ge=0, description="Number of distinct partner domains")
    partners: Dict[str, int] = Field(
        default_factory=dict,
        description="Partner domain -> number of joining edges"
    )

    def render(self) -> str:
        """Partners as 'Landscape (3), Politics' with multiplicities above one"""
        parts = []
        for name, mult in self.partners.items():
            parts.append(f"{name} ({mult})" if mult > 1 else name)
        return ", ".join(parts)


class ConnectionRecord(BaseModel):
    """A classified directed triple (a, z, b)"""
    triple: Tuple[str, str, str]
    connection: ConnectionKind


class NetworkReport(BaseModel):
    """Post-estimation summary of a learned network"""
    nodes: int
    directed_edges: int
    undirected_edges: int
    components: List[List[str]]
    isolated: List[str]
    ambiguous: List[Tuple[str, str]] = Field(
        default_factory=list,
        description="Undirected adjacencies; they carry no influence"
    )
    degrees: DegreeTable
    connection_counts: Dict[str, int]
    influence: List[InfluenceSet] = Field(default_factory=list)
    domains: Optional[List[DomainConnection]] = None
