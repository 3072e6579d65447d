import enum
from dataclasses import dataclass, field
from typing import Mapping


class WeightingMode(str, enum.Enum):
    LINEAR = "linear"
    QUADRATIC = "quadratic"


@dataclass(frozen=True)
class BriberyScale:
    """Internal (tokens) and external (players) bribery requirements for one scenario"""
    largest_bloc_tokens: float
    tokens_needed_raw: float
    tokens_needed: float
    players_needed: float
    players_needed_ceil: int


@dataclass(frozen=True)
class PivotalBribeGame:
    n: int
    U: float
    epsilon: float


@dataclass(frozen=True)
class PivotalOutcome:
    outcome_yes: bool
    payments: tuple
    payoffs: tuple
    pivotal: tuple
    briber_cost: float


@dataclass(frozen=True)
class EnsureBudget:
    cost: float
    targets: frozenset
    fraction: float


@dataclass(frozen=True)
class QVTheoremVerdict:
    subsets_checked: int
    holds: bool
    counterexamples: tuple = ()


@dataclass(frozen=True)
class QVCorollaryVerdict:
    beneficiaries: frozenset
    precondition_held: bool
    linear: EnsureBudget | None
    quadratic: EnsureBudget | None
    weak_held: bool | None
    strict_held: bool | None
    witness: Mapping[str, object] = field(default_factory=dict)
