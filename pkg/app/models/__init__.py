from .scenario import Outcome, Scenario, TallyResult, Violation, Vote
from .metrics import (
    ClusteringKind,
    ClusteringSpec,
    EntropyKind,
    EntropySpec,
    MasterTheoremVerdict,
    Partition,
)
from .bribery import (
    BriberyScale,
    EnsureBudget,
    PivotalBribeGame,
    PivotalOutcome,
    QVCorollaryVerdict,
    QVTheoremVerdict,
    WeightingMode,
)
from .transforms import (
    Applied,
    Apathy,
    BribeFlip,
    Delegation,
    Herding,
    Slates,
    Sybil,
    TheoremId,
    TheoremVerdict,
    Transformation,
)

__all__ = [
    "Outcome", "Scenario", "TallyResult", "Violation", "Vote",
    "ClusteringKind", "ClusteringSpec", "EntropyKind", "EntropySpec",
    "MasterTheoremVerdict", "Partition",
    "Applied", "Apathy", "BribeFlip", "Delegation", "Herding", "Slates", "Sybil",
    "TheoremId", "TheoremVerdict", "Transformation",
    "BriberyScale", "EnsureBudget", "PivotalBribeGame", "PivotalOutcome",
    "QVCorollaryVerdict", "QVTheoremVerdict", "WeightingMode",
]
